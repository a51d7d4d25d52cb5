// Prints one PASS/FAIL line per acceptance criterion. Exits 0 once every
// criterion has been evaluated; the lines are the verdict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pair_instances.hpp"
#include "v2x/assignment.hpp"
#include "v2x/capacity.hpp"
#include "v2x/channel.hpp"
#include "v2x/link_adaptation.hpp"
#include "v2x/metrics.hpp"
#include "v2x/power_control.hpp"
#include "v2x/simulation.hpp"

using namespace v2x;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// RBs for a 400-bit packet at every MCS.
Verdict rb_table() {
  const std::vector<int> expected{16, 11, 7, 4, 3, 3, 2, 2, 1, 1, 1, 1, 1, 1, 1};
  const auto got = rb_requirements(McsTable::standard(), 400.0);
  std::string s;
  for (int x : got) s += (s.empty() ? "" : ",") + std::to_string(x);
  return {got == expected, "rbs {" + s + "}"};
}

// Partial matchings over non-negative weights: the best square permutation
// after zero padding, with forbidden cells contributing nothing.
double brute_force(const WeightMatrix& w) {
  const int n = std::max(w.rows(), w.cols());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double s = 0.0;
    for (int r = 0; r < w.rows(); ++r) {
      const int c = perm[static_cast<std::size_t>(r)];
      if (c < w.cols() && std::isfinite(w(r, c))) s += w(r, c);
    }
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Verdict hungarian_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 7);
  std::uniform_int_distribution<int> val(0, 99);
  std::bernoulli_distribution forbid(0.2);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    WeightMatrix w(dim(rng), dim(rng), 0.0);
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) w(r, c) = forbid(rng) ? kForbidden : static_cast<double>(val(rng));
    }
    if (max_weight_matching(w).total != brute_force(w)) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in 1000 matrices"};
}

Verdict outage_soundness() {
  std::mt19937_64 rng(31);
  testing::OutageSampler sampler(3131);
  const int draws = 1000000;
  int checked = 0;
  int bad = 0;
  double worst_z = -std::numeric_limits<double>::infinity();
  double worst_residual = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto p = testing::random_pair(rng, 1e-3, 0.1);
    const auto s = solve_pair_power(p);
    if (!s.feasible) continue;
    ++checked;
    const double mc = sampler.outage(p, s.p_c_star, s.p_v_star, draws);
    const double sd = std::sqrt(p.p0 * (1.0 - p.p0) / draws);
    worst_z = std::max(worst_z, (mc - p.p0) / sd);
    worst_residual = std::max(worst_residual, std::abs(s.residual));
    if (mc > p.p0 + 3.0 * sd || std::abs(s.residual) > 1e-6) ++bad;
  }
  return {bad == 0 && checked > 0,
          fmt("%.0f feasible instances, worst excess %.2f sd, worst residual %.1e", checked, worst_z, worst_residual)};
}

// Per instance, one common sample of the aged fading on both VUE links.
// For each CUE power column the smallest feasible VUE power is the
// (1 - p0) quantile of the power each draw needs, so feasibility of every
// grid point follows from one sort per column.
Verdict near_optimality() {
  std::mt19937_64 rng(41);
  std::mt19937_64 draw(4141);
  std::normal_distribution<double> n01(0.0, 1.0);
  const int grid = 200;
  const int samples = 200000;
  int compared = 0;
  int beaten = 0;
  double worst_gap = -std::numeric_limits<double>::infinity();
  for (int inst = 0; inst < 10;) {
    const auto p = testing::random_pair(rng);
    const auto s = solve_pair_power(p);
    if (!s.feasible) continue;
    ++inst;
    const double best = cue_rate(p, s.p_c_star, s.p_v_star);

    std::vector<double> own(samples), cross(samples);
    const double sv = std::sqrt((1.0 - p.eps_v * p.eps_v) / 2.0);
    const double scv = std::sqrt((1.0 - p.eps_cv * p.eps_cv) / 2.0);
    for (int k = 0; k < samples; ++k) {
      const double a = sv * n01(draw), b = sv * n01(draw), c = scv * n01(draw), d = scv * n01(draw);
      own[static_cast<std::size_t>(k)] = p.eps_v * p.eps_v * p.h_v_sq + a * a + b * b;
      cross[static_cast<std::size_t>(k)] = p.eps_cv * p.eps_cv * p.h_cv_sq + c * c + d * d;
    }
    const double dc = p.pc_max_mw / grid;
    const double dv = p.pv_max_mw / grid;
    std::vector<double> need(samples);
    // outage iff SINR <= gamma0, so a sample is covered iff pv > need
    const auto allowed = static_cast<std::size_t>(std::floor(p.p0 * samples));
    for (int i = 1; i <= grid; ++i) {
      const double pc = dc * i;
      for (int k = 0; k < samples; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        need[kk] = p.gamma0 * (p.noise_vue_mw + pc * p.alpha_cv * cross[kk]) / (p.alpha_v * own[kk]);
      }
      const auto q = need.end() - static_cast<std::ptrdiff_t>(allowed) - 1;
      std::nth_element(need.begin(), q, need.end());
      const double pv_min = *q;  // at most `allowed` samples need more than this
      for (int j = 1; j <= grid; ++j) {
        const double pv = dv * j;
        if (!(pv > pv_min)) continue;
        const double r = cue_rate(p, pc, pv);
        const double step = std::max(r - cue_rate(p, pc - dc, pv), cue_rate(p, pc, pv - dv) - r);
        worst_gap = std::max(worst_gap, (r - best) / std::max(step, 1e-300));
        ++compared;
        if (r > best + step) ++beaten;
      }
    }
  }
  return {beaten == 0, fmt("%.0f feasible grid points, %.0f beat the solver by more than one cell (worst %.2f cells)",
                           compared, beaten, worst_gap)};
}

long double j0_series(long double x) {
  long double term = 1.0L;
  long double sum = 1.0L;
  const long double q = x * x / 4.0L;
  for (int k = 1; k < 80; ++k) {
    term *= -q / (static_cast<long double>(k) * k);
    sum += term;
  }
  return sum;
}

Verdict jakes() {
  const double eps = jakes_epsilon(13.89, 28e9, 0.125e-3);
  const double arg = 2.0 * kPi * 13.89 * 28e9 / kSpeedOfLight * 0.125e-3;
  const double oracle = static_cast<double>(j0_series(arg));
  const double speed_at_zero = 2.4048 * kSpeedOfLight / (2.0 * kPi * 28e9 * 0.125e-3);
  const double at_zero = jakes_epsilon(speed_at_zero, 28e9, 0.125e-3);
  const bool ok = std::abs(eps - 0.757) <= 1e-3 && std::abs(eps - oracle) <= 1e-3 && std::abs(at_zero) <= 1e-4;
  return {ok, fmt("eps %.6f, series %.6f, at 2.4048 %.2e", eps, oracle, at_zero)};
}

SimulationConfig scaled(SchedulerKind kind, int cues, double duration_s) {
  SimulationConfig c;
  c.kind = kind;
  c.scenario.num_cues = cues;
  c.scenario.num_vue_pairs = 10;
  c.scenario.num_bues = 10;
  c.duration_s = duration_s;
  return c;
}

Verdict invariants(SchedulerKind kind) {
  const auto r = run_simulation(scaled(kind, 50, 0.5), 1);
  std::int64_t extra = 0;
  for (int k = 0; k < 2; ++k) {
    const auto& users = k == 0 ? r.cues : r.vues;
    const double ttl = k == 0 ? r.cue_ttl_ms : r.vue_ttl_ms;
    for (const auto& u : users) {
      if (u.pending() < 0 || u.served != static_cast<std::int64_t>(u.delay_ms.size())) ++extra;
      for (double d : u.delay_ms) {
        if (d > ttl) ++extra;
      }
    }
  }
  const bool ticks_ok = r.counters.ttis_bwp1 == 4000 && r.counters.ttis_bwp2 == 500;
  std::string first = r.violations.empty() ? "" : ", first: " + r.violations.front();
  return {r.violation_count == 0 && extra == 0 && ticks_ok,
          to_string(kind) + ": " + std::to_string(r.violation_count) + " per-TTI violations, " +
              std::to_string(extra) + " end-of-run violations over " + std::to_string(r.counters.ttis_bwp1) +
              " TTIs" + first};
}

Verdict invariant_suite() {
  Verdict all{true, ""};
  for (auto kind : {SchedulerKind::kGrahs, SchedulerKind::kHrahs, SchedulerKind::kOra}) {
    const auto v = invariants(kind);
    all.pass = all.pass && v.pass;
    all.detail += (all.detail.empty() ? "" : "; ") + v.detail;
  }
  return all;
}

Verdict capacity_ordering() {
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  int cap[3] = {0, 0, 0};
  std::string detail;
  const SchedulerKind kinds[3] = {SchedulerKind::kOra, SchedulerKind::kGrahs, SchedulerKind::kHrahs};
  for (int i = 0; i < 3; ++i) {
    const auto r = capacity_search(scaled(kinds[i], 10, 0.5), 10, 300, seeds);
    cap[i] = r.capacity;
    detail += to_string(kinds[i]) + " " + std::to_string(r.capacity) + (r.unmet_at_min ? " (unmet at minimum)" : "") + ", ";
  }
  const bool ok = cap[0] < cap[1] && cap[1] <= cap[2] && cap[2] >= 1.2 * cap[0];
  return {ok, detail + "range [10, 300], 3 seeds, 0.5 s"};
}

Verdict one_rb_only() {
  double plr[2] = {0.0, 0.0};
  for (int k = 0; k < 2; ++k) {
    auto cfg = scaled(SchedulerKind::kGrahs, 100, 0.5);
    cfg.scheduler.one_rb_only = k == 1;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) plr[k] += run_simulation(cfg, seed).cue_plr() / 3.0;
  }
  return {plr[1] > plr[0], fmt("CUE PLR unrestricted %.4f, one RB only %.4f", plr[0], plr[1])};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const auto base = std::filesystem::temp_directory_path() / "v2x_acceptance_determinism";
  int differing = 0;
  int files = 0;
  for (auto kind : {SchedulerKind::kGrahs, SchedulerKind::kHrahs, SchedulerKind::kOra}) {
    for (int rep = 0; rep < 2; ++rep) {
      write_metric_files((base / (to_string(kind) + std::to_string(rep))).string(),
                         {run_simulation(scaled(kind, 50, 0.2), 11)});
    }
    for (const char* f : {"plr.csv", "delay_cdf.csv", "sumrate.csv", "outage.csv", "rb_cdf.csv"}) {
      ++files;
      if (read_file(base / (to_string(kind) + "0") / f) != read_file(base / (to_string(kind) + "1") / f)) ++differing;
    }
  }
  std::filesystem::remove_all(base);
  return {differing == 0, std::to_string(differing) + " of " + std::to_string(files) + " CSV files differ"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "RB requirements per MCS", 1.0, rb_table},
      {2, "Hungarian equals exhaustive search", 10.0, hungarian_oracle},
      {3, "power control outage soundness", 120.0, outage_soundness},
      {4, "power control near-optimality", 300.0, near_optimality},
      {5, "Jakes correlation coefficient", 1.0, jakes},
      {6, "scheduler invariants over 0.5 s", 360.0, invariant_suite},
      {7, "capacity ordering at desk scale", 1800.0, capacity_ordering},
      {8, "link adaptation necessity", 600.0, one_rb_only},
      {9, "determinism", 60.0, determinism},
  };
  int passed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    auto v = c.run();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s > c.limit_s) {
      v.pass = false;
      v.detail += fmt(" (over the %.0f s budget)", c.limit_s);
    }
    passed += v.pass ? 1 : 0;
    std::printf("CRITERION %d %s: %s [%.1f s] %s\n", c.id, v.pass ? "PASS" : "FAIL", c.name, s, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d of %zu criteria passed\n", passed, criteria.size());
  return 0;
}
