#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "fake_channel.hpp"
#include "v2x/assignment.hpp"
#include "v2x/schedulers.hpp"

using namespace v2x;
using v2x::testing::cue_packet;
using v2x::testing::FakeChannel;
using v2x::testing::flat_gains;
using v2x::testing::vue_packet;

namespace {

struct Bench {
  LargeScaleGains gains;
  FakeChannel channel;
  McsTable table = McsTable::standard();
  SchedulerWorld world;

  Bench(LargeScaleGains g, int rbs, int cues, int vues, double eps = 0.9)
      : gains(std::move(g)), channel(rbs, cues, vues, eps), world{gains, channel, table, 1.0, 1.0, 1.0} {}
};

std::vector<Packet> cues(int n, Tick t_gen = 0) {
  std::vector<Packet> out;
  for (int c = 0; c < n; ++c) out.push_back(cue_packet(static_cast<std::uint64_t>(c), c, t_gen));
  return out;
}

std::vector<Packet> vues(int n, std::uint64_t first_id = 1000) {
  std::vector<Packet> out;
  for (int v = 0; v < n; ++v) out.push_back(vue_packet(first_id + static_cast<std::uint64_t>(v), v));
  return out;
}

double to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace

TEST_CASE("scheduler names round-trip") {
  for (auto k : {SchedulerKind::kGrahs, SchedulerKind::kHrahs, SchedulerKind::kOra}) {
    CHECK(parse_scheduler(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_scheduler("pf"), ConfigError);
}

TEST_CASE("scheduler config validation") {
  SchedulerConfig cfg;
  CHECK_NOTHROW(cfg.validate(32));
  CHECK_THROWS_AS(cfg.validate(30), ConfigError);
  cfg.c_t = 9;
  CHECK_THROWS_AS(cfg.validate(32), ConfigError);
  cfg = {};
  cfg.p0 = 1.0;
  CHECK_THROWS_AS(cfg.validate(32), ConfigError);
}

TEST_CASE("head of line keeps the first packet per owner") {
  std::vector<Packet> b{cue_packet(1, 2), cue_packet(2, 2), cue_packet(3, 0)};
  const auto h = head_of_line(b);
  REQUIRE(h.size() == 2);
  CHECK(h[0]->id == 1);
  CHECK(h[1]->id == 3);
}

TEST_CASE("GRAHS without VUEs is the greedy link-adapted allocation") {
  std::mt19937_64 rng(5);
  Bench b(flat_gains(6, 2, 8.0, 30.0, -30.0, -30.0), 32, 6, 2);
  b.channel.randomize(rng);
  SchedulerConfig cfg;
  const auto out = grahs_tti(b.world, cues(6), {}, cfg);
  CHECK(out.vues.empty());
  CHECK(out.pair_candidates == 0);

  // replay the greedy pass by hand
  std::vector<char> used(32, 0);
  std::size_t k = 0;
  for (int c = 0; c < 6; ++c) {
    std::vector<RbSnr> cands;
    for (int rb = 0; rb < 32; ++rb) {
      if (!used[static_cast<std::size_t>(rb)]) {
        cands.push_back({rb, to_db(b.gains.cue_gnb[static_cast<std::size_t>(c)] * b.channel.cue_gnb(c, rb))});
      }
    }
    const auto a = min_rb_allocation(cands, 400.0, BlerTarget::kTenPercent, b.table);
    if (!a) continue;
    REQUIRE(k < out.cues.size());
    CHECK(out.cues[k].cue == c);
    CHECK(out.cues[k].rbs == a->rbs);
    CHECK(out.cues[k].mcs == a->mcs);
    CHECK(out.cues[k].power_mw == 1.0);
    for (int rb : a->rbs) used[static_cast<std::size_t>(rb)] = 1;
    ++k;
  }
  CHECK(k == out.cues.size());
}

TEST_CASE("ORA without VUEs treats CUEs like the GRAHS greedy pass") {
  std::mt19937_64 rng(6);
  Bench b(flat_gains(8, 1, 5.0, 30.0, -30.0, -30.0), 32, 8, 1);
  b.channel.randomize(rng);
  SchedulerConfig cfg;
  const auto g = grahs_tti(b.world, cues(8), {}, cfg);
  const auto o = ora_tti(b.world, cues(8), {}, cfg);
  REQUIRE(g.cues.size() == o.cues.size());
  for (std::size_t i = 0; i < g.cues.size(); ++i) {
    CHECK(g.cues[i].cue == o.cues[i].cue);
    CHECK(g.cues[i].rbs == o.cues[i].rbs);
    CHECK(g.cues[i].mcs == o.cues[i].mcs);
  }
}

TEST_CASE("GRAHS pairs a well-separated CUE and VUE") {
  Bench b(flat_gains(1, 1, 20.0, 30.0, -30.0, -30.0), 8, 1, 1);
  SchedulerConfig cfg;
  const auto out = grahs_tti(b.world, cues(1), vues(1), cfg);
  REQUIRE(out.cues.size() == 1);
  REQUIRE(out.vues.size() == 1);
  const auto& c = out.cues[0];
  const auto& v = out.vues[0];
  CHECK(out.pair_candidates == 1);
  CHECK(out.final_check_failures == 0);
  CHECK(c.paired_vue == 0);
  CHECK(v.host_cue == 0);
  for (int rb : v.rbs) CHECK(std::find(c.rbs.begin(), c.rbs.end(), rb) != c.rbs.end());

  // hand-stepped: greedy grant, power solve, rate check, final recount
  const std::vector<int> rbs = {0};
  CHECK(c.rbs == rbs);
  const auto params = pair_params(b.world, cfg, 0, 0, rbs);
  const auto sol = solve_pair_power(params);
  REQUIRE(sol.feasible);
  CHECK(c.power_mw == sol.p_c_star);
  CHECK(v.power_mw == sol.p_v_star);
  CHECK(outage_probability(params, c.power_mw, v.power_mw) <= cfg.p0 * (1.0 + 1e-6));
  const double sinr_c = cue_rb_sinr(b.world, 0, sol.p_c_star, 0, 0, sol.p_v_star);
  CHECK(std::log2(1.0 + sinr_c) >= cfg.r0);
  CHECK(c.mcs == *select_mcs(b.table, to_db(sinr_c), BlerTarget::kTenPercent));
  const double sinr_v = vue_rb_sinr(b.world, 0, sol.p_v_star, 0, 0, sol.p_c_star);
  CHECK(v.mcs == *select_mcs(b.table, to_db(sinr_v), BlerTarget::kOnePercent));
  CHECK(check_allocation(out, SchedulerKind::kGrahs, cfg, 8, 1.0).empty());
}

TEST_CASE("GRAHS final check defers the VUE when the CUE loses its MCS") {
  // 12 dB carries 400 bits on one RB; a loud VUE at the gNB breaks that
  Bench b(flat_gains(1, 1, 12.0, 30.0, -30.0, 25.0), 8, 1, 1);
  SchedulerConfig cfg;
  cfg.r0 = 0.0;
  const auto out = grahs_tti(b.world, cues(1), vues(1), cfg);
  REQUIRE(out.pair_candidates == 1);
  REQUIRE(out.cues.size() == 1);
  CHECK(out.cues[0].rbs.size() == 1);
  CHECK(out.final_check_failures == 1);
  CHECK(out.vues.empty());
  CHECK(out.deferred_vues == std::vector<int>{0});
  CHECK(out.cues[0].power_mw == 1.0);
  CHECK(out.cues[0].paired_vue == -1);
}

TEST_CASE("GRAHS drops pairs whose recomputed SE falls below r0") {
  Bench b(flat_gains(1, 1, 12.0, 30.0, -30.0, 25.0), 8, 1, 1);
  SchedulerConfig cfg;
  cfg.r0 = 100.0;
  const auto out = grahs_tti(b.world, cues(1), vues(1), cfg);
  CHECK(out.pair_candidates == 0);
  CHECK(out.vues.empty());
  CHECK(out.deferred_vues.empty());
}

TEST_CASE("GRAHS honours C_t") {
  Bench b(flat_gains(5, 1, 20.0, 30.0, -30.0, -30.0), 32, 5, 1);
  SchedulerConfig cfg;
  cfg.c_t = 1;
  const auto out = grahs_tti(b.world, cues(5), {}, cfg);
  REQUIRE(out.cues.size() == 1);
  CHECK(out.cues[0].cue == 0);
}

TEST_CASE("GRAHS one-RB mode skips CUEs that need more") {
  Bench b(flat_gains(2, 1, 20.0, 30.0, -30.0, -30.0), 32, 2, 1);
  b.gains.cue_gnb[0] = db_to_linear(5.0);  // needs 3 RBs at MCS 5
  SchedulerConfig cfg;
  cfg.one_rb_only = true;
  const auto out = grahs_tti(b.world, cues(2), {}, cfg);
  REQUIRE(out.cues.size() == 1);
  CHECK(out.cues[0].cue == 1);
}

TEST_CASE("HRAHS pads with null users and serves only real CUEs") {
  Bench b(flat_gains(2, 1, 10.0, 30.0, -30.0, -30.0), 32, 2, 1);
  SchedulerConfig cfg;
  const auto out = hrahs_tti(b.world, cues(2), {}, cfg);
  REQUIRE(out.cues.size() == 2);
  std::set<int> rcs;
  for (const auto& g : out.cues) {
    CHECK(g.rbs.size() == 4);
    CHECK(g.rbs.front() == g.rc * 4);
    rcs.insert(g.rc);
  }
  CHECK(rcs.size() == 2);
  CHECK(check_allocation(out, SchedulerKind::kHrahs, cfg, 32, 1.0).empty());
}

TEST_CASE("HRAHS leaves out a CUE that cannot fit one RC") {
  Bench b(flat_gains(3, 1, 10.0, 30.0, -30.0, -30.0), 32, 3, 1);
  b.gains.cue_gnb[1] = db_to_linear(-2.0);   // MCS 3, needs 7 RBs
  b.gains.cue_gnb[2] = db_to_linear(-10.0);  // below every MCS
  SchedulerConfig cfg;
  const auto out = hrahs_tti(b.world, cues(3), {}, cfg);
  REQUIRE(out.cues.size() == 1);
  CHECK(out.cues[0].cue == 0);
}

TEST_CASE("HRAHS RC assignment equals the permutation brute force") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> snr_db(2.0, 25.0);
  for (int trial = 0; trial < 5; ++trial) {
    Bench b(flat_gains(8, 1, 0.0, 30.0, -30.0, -30.0), 32, 8, 1);
    for (auto& g : b.gains.cue_gnb) g = db_to_linear(snr_db(rng));
    b.channel.randomize(rng);
    SchedulerConfig cfg;
    const auto out = hrahs_tti(b.world, cues(8), {}, cfg);

    // weights from the definition
    std::vector<std::vector<double>> w(8, std::vector<double>(8));
    for (int c = 0; c < 8; ++c) {
      for (int j = 0; j < 8; ++j) {
        double mean = 0.0;
        for (int k = 0; k < 4; ++k) mean += b.channel.cue_gnb(c, 4 * j + k) / 4.0;
        const double snr = b.gains.cue_gnb[static_cast<std::size_t>(c)] * mean;
        const auto m = select_mcs(b.table, to_db(snr), BlerTarget::kTenPercent);
        const bool fits = m && std::ceil(400.0 / (168.0 * b.table.row(*m).se) - 1e-12) <= 4;
        w[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] = fits ? std::log2(1.0 + snr) : kForbidden;
      }
    }
    std::vector<int> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
      double s = 0.0;
      for (int c = 0; c < 8; ++c) {
        const double x = w[static_cast<std::size_t>(c)][static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])];
        if (x > 0.0) s += x;  // a forbidden cell is the same as leaving the CUE out
      }
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));

    double total = 0.0;
    for (const auto& g : out.cues) total += w[static_cast<std::size_t>(g.cue)][static_cast<std::size_t>(g.rc)];
    CHECK(total == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("HRAHS pairs inside the RC") {
  Bench b(flat_gains(1, 1, 15.0, 30.0, -30.0, -30.0), 32, 1, 1);
  SchedulerConfig cfg;
  const auto out = hrahs_tti(b.world, cues(1), vues(1), cfg);
  REQUIRE(out.cues.size() == 1);
  REQUIRE(out.vues.size() == 1);
  CHECK(out.vues[0].rbs.size() <= 4);
  for (int rb : out.vues[0].rbs) CHECK(rb / 4 == out.cues[0].rc);
  CHECK(check_allocation(out, SchedulerKind::kHrahs, cfg, 32, 1.0).empty());
}

TEST_CASE("ORA serves the VUE first") {
  Bench b(flat_gains(1, 1, 20.0, 30.0, -30.0, -30.0), 8, 1, 1);
  SchedulerConfig cfg;
  cfg.c_t = 1;
  const auto out = ora_tti(b.world, cues(1), vues(1), cfg);
  CHECK(out.cues.empty());
  REQUIRE(out.vues.size() == 1);
  CHECK(out.vues[0].host_cue == -1);
  CHECK(out.vues[0].power_mw == 1.0);
}

TEST_CASE("ORA caps users per TTI across both kinds") {
  Bench b(flat_gains(2, 1, 20.0, 30.0, -30.0, -30.0), 32, 2, 1);
  SchedulerConfig cfg;
  cfg.c_t = 2;
  const auto out = ora_tti(b.world, cues(2), vues(1), cfg);
  CHECK(out.vues.size() == 1);
  REQUIRE(out.cues.size() == 1);
  CHECK(out.cues[0].cue == 0);
  CHECK(check_allocation(out, SchedulerKind::kOra, cfg, 32, 1.0).empty());
}

TEST_CASE("max C/I picks the best user per RB") {
  CHECK(max_ci_allocate({{1.0, 2.0, 3.0}}) == std::vector<int>{0, 0, 0});
  CHECK(max_ci_allocate({{5.0, 1.0, 5.0, 1.0}, {1.0, 5.0, 1.0, 5.0}}) == std::vector<int>{0, 1, 0, 1});
  CHECK(max_ci_allocate({{}, {}}).empty());
  CHECK(max_ci_allocate({}).empty());
}

TEST_CASE("allocation checker flags broken allocations") {
  SchedulerConfig cfg;
  AllocationResult a;
  a.cues.push_back({0, 1, {0, 1}, 5, 1.0});
  a.cues.push_back({1, 2, {1}, 5, 1.0});
  CHECK_FALSE(check_allocation(a, SchedulerKind::kGrahs, cfg, 32, 1.0).empty());

  a.cues[1].rbs = {2};
  CHECK(check_allocation(a, SchedulerKind::kGrahs, cfg, 32, 1.0).empty());
  a.cues[1].power_mw = 2.0;
  CHECK_FALSE(check_allocation(a, SchedulerKind::kGrahs, cfg, 32, 1.0).empty());
  a.cues[1].power_mw = 1.0;

  a.vues.push_back({0, 3, {5}, 4, 1.0, 0});
  a.cues[0].paired_vue = 0;
  CHECK_FALSE(check_allocation(a, SchedulerKind::kGrahs, cfg, 32, 1.0).empty());  // RB outside host
  a.vues[0].rbs = {1};
  CHECK(check_allocation(a, SchedulerKind::kGrahs, cfg, 32, 1.0).empty());
  CHECK_FALSE(check_allocation(a, SchedulerKind::kOra, cfg, 32, 1.0).empty());  // ORA never pairs

  a.vues.push_back({1, 4, {0}, 4, 1.0, 0});
  CHECK_FALSE(check_allocation(a, SchedulerKind::kGrahs, cfg, 32, 1.0).empty());  // two VUEs on one CUE
  a.vues.pop_back();

  cfg.c_t = 1;
  CHECK_FALSE(check_allocation(a, SchedulerKind::kGrahs, cfg, 32, 1.0).empty());
}

TEST_CASE("random worlds keep every scheduler invariant") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int nc = 1 + static_cast<int>(u(rng) * 20);
    const int nv = 1 + static_cast<int>(u(rng) * 10);
    LargeScaleGains g = flat_gains(nc, nv, 0.0, 0.0, 0.0, 0.0);
    for (auto& x : g.cue_gnb) x = db_to_linear(-5.0 + 30.0 * u(rng));
    for (auto& x : g.vue_link) x = db_to_linear(10.0 + 30.0 * u(rng));
    for (auto& x : g.vue_gnb) x = db_to_linear(-30.0 + 30.0 * u(rng));
    for (auto& x : g.cue_vue) x = db_to_linear(-40.0 + 35.0 * u(rng));
    Bench b(std::move(g), 32, nc, nv, 0.3 + 0.65 * u(rng));
    b.channel.randomize(rng);
    SchedulerConfig cfg;
    cfg.c_t = 1 + static_cast<int>(u(rng) * 8);
    for (auto kind : {SchedulerKind::kGrahs, SchedulerKind::kHrahs, SchedulerKind::kOra}) {
      const auto out = schedule_tti(kind, b.world, cues(nc), vues(nv), cfg);
      const auto bad = check_allocation(out, kind, cfg, 32, 1.0);
      for (const auto& s : bad) MESSAGE(to_string(kind) << ": " << s);
      CHECK(bad.empty());
      CHECK(static_cast<int>(out.cues.size()) <= cfg.c_t);
      if (kind == SchedulerKind::kOra) {
        for (const auto& v : out.vues) CHECK(v.host_cue == -1);
        continue;
      }
      // paired CUEs keep SE >= r0 under the chosen powers
      for (const auto& c : out.cues) {
        if (c.paired_vue < 0) continue;
        const auto it = std::find_if(out.vues.begin(), out.vues.end(),
                                     [&](const VueGrant& v) { return v.vue == c.paired_vue; });
        REQUIRE(it != out.vues.end());
        double rate = 0.0;
        for (int rb : c.rbs) rate += std::log2(1.0 + cue_rb_sinr(b.world, c.cue, c.power_mw, rb, it->vue, it->power_mw));
        CHECK(rate / static_cast<double>(c.rbs.size()) >= cfg.r0);
        CHECK(it->rbs.size() <= (kind == SchedulerKind::kHrahs ? 4u : c.rbs.size()));
      }
    }
  }
}
