#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

#include "v2x/assignment.hpp"
#include "v2x/channel.hpp"
#include "v2x/config.hpp"
#include "v2x/link_adaptation.hpp"
#include "v2x/power_control.hpp"
#include "v2x/runner.hpp"
#include "v2x/simulation.hpp"

namespace py = pybind11;
using namespace v2x;

namespace {

RunPlan plan_from(const std::map<std::string, std::string>& settings) {
  RunPlan plan;
  for (const auto& [k, v] : settings) set_config_value(plan, k, v);
  plan.validate();
  return plan;
}

py::dict summarize(const RunResult& r) {
  py::dict d;
  d["scheduler"] = r.scheduler;
  d["seed"] = r.seed;
  d["num_cues"] = r.num_cues;
  d["complete"] = r.complete;
  d["ttis_bwp1"] = r.counters.ttis_bwp1;
  d["ttis_bwp2"] = r.counters.ttis_bwp2;
  d["cue_plr"] = r.cue_plr();
  d["cue_satisfied_fraction"] = r.cue_satisfied_fraction();
  d["vue_outage"] = r.vue_outage_probability();
  d["cue_sum_rate_bps"] = r.cue_sum_rate_bps();
  d["bue_sum_rate_bps"] = r.bue_sum_rate_bps();
  d["pairs_served"] = r.counters.pairs_served;
  d["invariant_violations"] = r.violation_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_v2xsim, m) {
  m.doc() = "V2X sidelink sharing simulator core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DegenerateCsi>(m, "DegenerateCsi", PyExc_ValueError);

  m.def("bessel_j0", &bessel_j0, py::arg("x"));
  m.def("jakes_epsilon", &jakes_epsilon, py::arg("speed_mps"), py::arg("carrier_hz"), py::arg("period_s"));

  m.def(
      "rb_requirements", [](double bits) { return rb_requirements(McsTable::standard(), bits); },
      py::arg("bits") = 400.0, "RBs a packet needs at each MCS of the built-in table");
  m.def(
      "select_mcs",
      [](double snr_db, const std::string& bler) {
        return select_mcs(McsTable::standard(), snr_db, parse_bler_target(bler));
      },
      py::arg("snr_db"), py::arg("bler") = "0.1", "highest MCS index whose threshold the SNR meets, or None");

  m.def(
      "max_weight_matching",
      [](const std::vector<std::vector<std::optional<double>>>& rows) {
        const int r = static_cast<int>(rows.size());
        const int c = r == 0 ? 0 : static_cast<int>(rows.front().size());
        WeightMatrix w(r, c, kForbidden);
        for (int i = 0; i < r; ++i) {
          if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != c) {
            throw std::invalid_argument("weight rows must all have the same length");
          }
          for (int j = 0; j < c; ++j) {
            const auto& x = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (x) w(i, j) = *x;
          }
        }
        const auto m = max_weight_matching(w);
        return py::make_tuple(m.pairs, m.total);
      },
      py::arg("weights"), "partial max-weight matching; None or -inf marks a forbidden cell");

  py::class_<PairLinkParams>(m, "PairLinkParams")
      .def(py::init<>())
      .def_readwrite("alpha_v", &PairLinkParams::alpha_v)
      .def_readwrite("alpha_cv", &PairLinkParams::alpha_cv)
      .def_readwrite("alpha_tilde_v", &PairLinkParams::alpha_tilde_v)
      .def_readwrite("alpha_cz", &PairLinkParams::alpha_cz)
      .def_readwrite("eps_v", &PairLinkParams::eps_v)
      .def_readwrite("eps_cv", &PairLinkParams::eps_cv)
      .def_readwrite("h_v_sq", &PairLinkParams::h_v_sq)
      .def_readwrite("h_cv_sq", &PairLinkParams::h_cv_sq)
      .def_readwrite("h_cz_sq", &PairLinkParams::h_cz_sq)
      .def_readwrite("h_tilde_v_sq", &PairLinkParams::h_tilde_v_sq)
      .def_readwrite("noise_vue_mw", &PairLinkParams::noise_vue_mw)
      .def_readwrite("noise_gnb_mw", &PairLinkParams::noise_gnb_mw)
      .def_readwrite("gamma0", &PairLinkParams::gamma0)
      .def_readwrite("p0", &PairLinkParams::p0)
      .def_readwrite("pc_max_mw", &PairLinkParams::pc_max_mw)
      .def_readwrite("pv_max_mw", &PairLinkParams::pv_max_mw);

  m.def(
      "solve_pair_power",
      [](const PairLinkParams& p) {
        const auto s = solve_pair_power(p);
        py::dict d;
        d["feasible"] = s.feasible;
        d["case"] = static_cast<int>(s.case_taken);
        d["p_c_mw"] = s.p_c_star;
        d["p_v_mw"] = s.p_v_star;
        d["pc0_mw"] = s.bp.pc0;
        d["pv0_mw"] = s.bp.pv0;
        d["residual"] = s.residual;
        d["reason"] = s.reason;
        return d;
      },
      py::arg("params"));
  m.def("outage_probability", &outage_probability, py::arg("params"), py::arg("p_c_mw"), py::arg("p_v_mw"));
  m.def("cue_rate", &cue_rate, py::arg("params"), py::arg("p_c_mw"), py::arg("p_v_mw"));

  m.def("config_keys", [] {
    std::vector<std::string> out;
    for (const auto& k : config_keys()) out.push_back(k.dotted());
    return out;
  });
  m.def(
      "default_config",
      [] {
        std::map<std::string, std::string> out;
        for (const auto& [k, v] : config_items(RunPlan{})) out[k] = v;
        return out;
      },
      "every configuration key with its default value");

  m.def(
      "run",
      [](const std::map<std::string, std::string>& settings, std::uint64_t seed) {
        const auto plan = plan_from(settings);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_simulation(plan.sim, seed);
        }
        return summarize(r);
      },
      py::arg("settings") = std::map<std::string, std::string>{}, py::arg("seed") = 1,
      "run one simulation and return its headline metrics");

  m.def(
      "run_plan",
      [](const std::map<std::string, std::string>& settings, const std::string& out_dir, int jobs) {
        const auto plan = plan_from(settings);
        std::vector<RunResult> results;
        {
          py::gil_scoped_release release;
          results = execute_jobs(expand_plan(plan), jobs);
          write_metric_files(out_dir, results);
        }
        py::list out;
        for (const auto& r : results) {
          auto d = summarize(r);
          d["group"] = r.group;
          out.append(d);
        }
        return out;
      },
      py::arg("settings"), py::arg("out_dir"), py::arg("jobs") = 1,
      "run every (sweep point, seed) of a plan and write the metric CSVs");
}
