#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "v2x/capacity.hpp"
#include "v2x/config.hpp"
#include "v2x/link_adaptation.hpp"
#include "v2x/power_control.hpp"
#include "v2x/runner.hpp"

using namespace v2x;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop = true; }

struct PlanOptions {
  std::string config;
  std::string scheduler;
  std::string seeds;
  double duration_s = 0.0;
  std::string sweep;
  std::vector<std::string> sets;
  std::string replay;
};

void add_plan_options(CLI::App* cmd, PlanOptions& o) {
  cmd->add_option("--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--scheduler", o.scheduler, "grahs, hrahs or ora");
  cmd->add_option("--seeds", o.seeds, "seed list, e.g. 1,2,3 or 1-10");
  cmd->add_option("--duration", o.duration_s, "simulated seconds per run");
  cmd->add_option("--set", o.sets, "override a key: section.key=value (repeatable)");
}

// defaults, then config file, then environment, then flags
RunPlan build_plan(const PlanOptions& o) {
  RunPlan plan;
  if (!o.replay.empty()) {
    std::ifstream in(o.replay);
    if (!in) throw ConfigError("cannot open summary '" + o.replay + "'");
    plan = plan_from_summary(nlohmann::json::parse(in));
  }
  if (!o.config.empty()) apply_config_file(plan, o.config);
  apply_env_overrides(plan);
  if (!o.scheduler.empty()) set_config_value(plan, "scheduler.kind", o.scheduler);
  if (!o.seeds.empty()) set_config_value(plan, "run.seeds", o.seeds);
  if (o.duration_s > 0.0) plan.sim.duration_s = o.duration_s;
  if (!o.sweep.empty()) plan.sweep = parse_sweep(o.sweep);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
    set_config_value(plan, s.substr(0, eq), s.substr(eq + 1));
  }
  plan.validate();
  return plan;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << std::setw(2) << j << '\n';
}

int cmd_run(const PlanOptions& o, const std::string& out_dir, int jobs) {
  const auto plan = build_plan(o);
  const auto work = expand_plan(plan);
  std::cerr << "running " << work.size() << " simulation(s) on " << jobs << " worker(s)\n";
  const auto results = execute_jobs(work, jobs, &g_stop);
  bool complete = !g_stop;
  for (const auto& r : results) complete = complete && r.complete;

  write_metric_files(out_dir, results);
  std::ofstream(std::filesystem::path(out_dir) / "config.ini") << to_config_text(plan);
  write_json(std::filesystem::path(out_dir) / "summary.json", run_summary(plan, results, complete));
  const auto marker = std::filesystem::path(out_dir) / "INCOMPLETE";
  if (complete) {
    std::filesystem::remove(marker);
  } else {
    std::ofstream(marker) << "interrupted before every run finished\n";
  }

  std::int64_t violations = 0;
  for (const auto& r : results) {
    violations += r.violation_count;
    std::cout << std::left << std::setw(24) << (r.group.empty() ? "-" : r.group) << std::setw(7) << r.scheduler
              << " seed " << std::setw(4) << r.seed << " cue_plr " << std::setw(10) << r.cue_plr()
              << " satisfied " << std::setw(8) << r.cue_satisfied_fraction() << " vue_outage " << std::setw(10)
              << r.vue_outage_probability() << " cue_rate_mbps " << r.cue_sum_rate_bps() / 1e6 << '\n';
    for (const auto& v : r.violations) std::cerr << "  violation: " << v << '\n';
  }
  std::cerr << "results in " << out_dir << (complete ? "" : " (incomplete)") << '\n';
  if (!complete) return 130;
  return violations == 0 ? 0 : 3;
}

int cmd_capacity(const PlanOptions& o, const std::string& out_dir, int jobs, int lo, int hi,
                 const std::vector<std::string>& schedulers) {
  auto plan = build_plan(o);
  std::vector<CapacityResult> results;
  for (const auto& name : schedulers) {
    SimulationConfig sim = plan.sim;
    sim.kind = parse_scheduler(name);
    std::cerr << "capacity search for " << name << " over [" << lo << ", " << hi << "]\n";
    results.push_back(capacity_search(sim, lo, hi, plan.seeds, jobs, &g_stop));
    const auto& r = results.back();
    std::cout << name << ": capacity " << r.capacity << (r.unmet_at_min ? " (criterion unmet at range minimum)" : "")
              << (r.neighbors_consistent ? "" : " (non-monotone near the boundary)") << '\n';
    if (g_stop) break;
  }
  std::filesystem::create_directories(out_dir);
  std::ofstream os(std::filesystem::path(out_dir) / "capacity.csv");
  write_capacity_csv(os, results);
  return g_stop ? 130 : 0;
}

int cmd_validate_tables(const std::string& table_path, double bits) {
  const auto table = table_path.empty() ? McsTable::standard() : McsTable::from_file(table_path);
  const auto rbs = rb_requirements(table, bits);
  std::cout << "mcs  modulation  se     bits/rb   snr@0.1  snr@0.01  rbs(" << bits << " bits)\n";
  for (std::size_t i = 0; i < table.rows().size(); ++i) {
    const auto& r = table.rows()[i];
    std::cout << std::left << std::setw(5) << r.index << std::setw(12) << r.modulation << std::setw(7) << r.se
              << std::setw(10) << bits_per_rb(r.se) << std::setw(9) << r.snr_bler01_db << std::setw(10)
              << r.snr_bler001_db << rbs[i] << '\n';
  }
  if (!table_path.empty() || bits != kCuePacketBits) return 0;
  const std::vector<int> expected{16, 11, 7, 4, 3, 3, 2, 2, 1, 1, 1, 1, 1, 1, 1};
  if (rbs != expected) {
    std::cerr << "RB requirements differ from the reference table\n";
    return 1;
  }
  std::cout << "RB requirements match the reference table\n";
  return 0;
}

struct PowerOptions {
  double alpha_v_db = -80.0;
  double alpha_cv_db = -110.0;
  double alpha_tilde_v_db = -115.0;
  double alpha_cz_db = -100.0;
  double eps_v = 0.757;
  double eps_cv = 0.757;
  double h_v = 1.0;
  double h_cv = 1.0;
  double h_cz = 1.0;
  double h_tilde_v = 1.0;
  double noise_vue_dbm = -105.0;
  double noise_gnb_dbm = -109.0;
  double gamma0_db = 5.0;
  double p0 = 1e-3;
  double pmax_dbm = 23.0;
};

int cmd_power_solve(const PowerOptions& o) {
  PairLinkParams p;
  p.alpha_v = db_to_linear(o.alpha_v_db);
  p.alpha_cv = db_to_linear(o.alpha_cv_db);
  p.alpha_tilde_v = db_to_linear(o.alpha_tilde_v_db);
  p.alpha_cz = db_to_linear(o.alpha_cz_db);
  p.eps_v = o.eps_v;
  p.eps_cv = o.eps_cv;
  p.h_v_sq = o.h_v;
  p.h_cv_sq = o.h_cv;
  p.h_cz_sq = o.h_cz;
  p.h_tilde_v_sq = o.h_tilde_v;
  p.noise_vue_mw = dbm_to_mw(o.noise_vue_dbm);
  p.noise_gnb_mw = dbm_to_mw(o.noise_gnb_dbm);
  p.gamma0 = db_to_linear(o.gamma0_db);
  p.p0 = o.p0;
  p.pc_max_mw = p.pv_max_mw = dbm_to_mw(o.pmax_dbm);
  const auto s = solve_pair_power(p);
  nlohmann::json j{
      {"feasible", s.feasible},
      {"case", static_cast<int>(s.case_taken)},
      {"p_c_mw", s.p_c_star},
      {"p_v_mw", s.p_v_star},
      {"pc0_mw", s.bp.pc0},
      {"pv0_mw", s.bp.pv0},
      {"residual", s.residual},
      {"reason", s.reason},
  };
  if (s.feasible) {
    j["outage"] = outage_probability(p, s.p_c_star, s.p_v_star);
    j["cue_rate_bps_hz"] = cue_rate(p, s.p_c_star, s.p_v_star);
  }
  std::cout << std::setw(2) << j << '\n';
  return s.feasible ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"System-level simulator for V2X sidelink sharing on 5G NR bandwidth parts"};
  app.require_subcommand(1);

  PlanOptions run_opts;
  std::string out_dir = "results";
  int jobs = 1;
  auto* run = app.add_subcommand("run", "simulate a plan and write metric CSVs");
  add_plan_options(run, run_opts);
  run->add_option("--sweep", run_opts.sweep, "sweep one key: section.key=v1,v2,...");
  run->add_option("--replay", run_opts.replay, "rebuild the plan from a summary.json")->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);

  PlanOptions cap_opts;
  std::string cap_out = "results";
  int cap_jobs = 1;
  int lo = 10;
  int hi = 300;
  std::vector<std::string> schedulers{"ora", "grahs", "hrahs"};
  auto* cap = app.add_subcommand("capacity", "bisect the real-time traffic capacity in CUEs");
  add_plan_options(cap, cap_opts);
  cap->add_option("--min", lo, "smallest CUE count probed")->check(CLI::PositiveNumber);
  cap->add_option("--max", hi, "largest CUE count probed")->check(CLI::PositiveNumber);
  cap->add_option("--schedulers", schedulers, "schedulers to search")->delimiter(',');
  cap->add_option("--out", cap_out, "output directory");
  cap->add_option("--jobs", cap_jobs, "parallel runs")->check(CLI::PositiveNumber);

  PowerOptions pw;
  auto* power = app.add_subcommand("power-solve", "solve one CUE/VUE power pair and print the result");
  power->add_option("--alpha-v-db", pw.alpha_v_db, "VUE link gain");
  power->add_option("--alpha-cv-db", pw.alpha_cv_db, "CUE to VUE receiver gain");
  power->add_option("--alpha-tilde-v-db", pw.alpha_tilde_v_db, "VUE transmitter to gNB gain");
  power->add_option("--alpha-cz-db", pw.alpha_cz_db, "CUE to gNB gain");
  power->add_option("--eps-v", pw.eps_v, "VUE link CSI correlation");
  power->add_option("--eps-cv", pw.eps_cv, "cross link CSI correlation");
  power->add_option("--h-v", pw.h_v, "|h_v|^2 estimate");
  power->add_option("--h-cv", pw.h_cv, "|h_cv|^2 estimate");
  power->add_option("--h-cz", pw.h_cz, "|h_cZ|^2");
  power->add_option("--h-tilde-v", pw.h_tilde_v, "|h~_v|^2");
  power->add_option("--noise-vue-dbm", pw.noise_vue_dbm, "noise at the VUE receiver");
  power->add_option("--noise-gnb-dbm", pw.noise_gnb_dbm, "noise at the gNB");
  power->add_option("--gamma0-db", pw.gamma0_db, "VUE SINR threshold");
  power->add_option("--p0", pw.p0, "outage target");
  power->add_option("--pmax-dbm", pw.pmax_dbm, "power limit for both transmitters");

  std::string table_path;
  double bits = kCuePacketBits;
  auto* tables = app.add_subcommand("validate-tables", "print the MCS table with RB requirements");
  tables->add_option("--mcs-table", table_path, "table file instead of the built-in one")->check(CLI::ExistingFile);
  tables->add_option("--bits", bits, "packet size")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  std::signal(SIGINT, on_sigint);

  try {
    if (*run) return cmd_run(run_opts, out_dir, jobs);
    if (*cap) return cmd_capacity(cap_opts, cap_out, cap_jobs, lo, hi, schedulers);
    if (*power) return cmd_power_solve(pw);
    if (*tables) return cmd_validate_tables(table_path, bits);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
