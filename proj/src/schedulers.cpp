#include "v2x/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "v2x/assignment.hpp"

namespace v2x {

namespace {

double to_db(double linear) {
  return linear > 0.0 ? 10.0 * std::log10(linear) : -std::numeric_limits<double>::infinity();
}

int cue_rb_cap(const SchedulerConfig& cfg) { return cfg.one_rb_only ? 1 : cfg.max_rbs_per_packet; }

struct Candidate {
  double weight = kForbidden;
  double pc = 0.0;
  double pv = 0.0;
};

// Power solve and rate recomputation for every (scheduled CUE, buffered VUE)
// pair. Weight is the CUE rate over its RBs, -inf when infeasible or when
// the per-RB spectral efficiency drops below r0.
std::vector<std::vector<Candidate>> pair_candidates(SchedulerWorld& world,
                                                    const SchedulerConfig& cfg,
                                                    const std::vector<CueGrant>& grants,
                                                    const std::vector<const Packet*>& vues,
                                                    int& finite_count) {
  std::vector<std::vector<Candidate>> out(grants.size(), std::vector<Candidate>(vues.size()));
  for (std::size_t i = 0; i < grants.size(); ++i) {
    const auto& g = grants[i];
    for (std::size_t j = 0; j < vues.size(); ++j) {
      const int v = vues[j]->owner;
      const auto params = pair_params(world, cfg, g.cue, v, g.rbs);
      PowerSolution sol;
      try {
        sol = solve_pair_power(params);
      } catch (const DegenerateCsi&) {
        continue;
      }
      if (!sol.feasible) continue;
      double rate = 0.0;
      for (int rb : g.rbs) {
        rate += std::log2(1.0 + cue_rb_sinr(world, g.cue, sol.p_c_star, rb, v, sol.p_v_star));
      }
      if (rate / static_cast<double>(g.rbs.size()) < cfg.r0) continue;
      out[i][j] = {rate, sol.p_c_star, sol.p_v_star};
      ++finite_count;
    }
  }
  return out;
}

Matching match_pairs(const std::vector<std::vector<Candidate>>& cand, std::size_t n_cues,
                     std::size_t n_vues) {
  WeightMatrix w(static_cast<int>(n_cues), static_cast<int>(n_vues), kForbidden);
  for (std::size_t i = 0; i < n_cues; ++i) {
    for (std::size_t j = 0; j < n_vues; ++j) w(static_cast<int>(i), static_cast<int>(j)) = cand[i][j].weight;
  }
  return max_weight_matching(w);
}

std::vector<RbSnr> vue_candidates(SchedulerWorld& world, int vue, double pv,
                                  const std::vector<int>& rbs, int cue, double pc) {
  std::vector<RbSnr> out;
  out.reserve(rbs.size());
  for (int rb : rbs) out.push_back({rb, to_db(vue_rb_sinr(world, vue, pv, rb, cue, pc))});
  return out;
}

}  // namespace

SchedulerKind parse_scheduler(const std::string& name) {
  if (name == "grahs") return SchedulerKind::kGrahs;
  if (name == "hrahs") return SchedulerKind::kHrahs;
  if (name == "ora") return SchedulerKind::kOra;
  throw ConfigError("unknown scheduler '" + name + "' (expected grahs, hrahs or ora)");
}

std::string to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::kGrahs:
      return "grahs";
    case SchedulerKind::kHrahs:
      return "hrahs";
    case SchedulerKind::kOra:
      return "ora";
  }
  return "?";
}

void SchedulerConfig::validate(int num_rbs) const {
  if (c_t < 1) throw ConfigError("scheduler.c_t must be >= 1");
  if (rc_size < 1 || n_rc < 1) throw ConfigError("scheduler RC dimensions must be >= 1");
  if (n_rc * rc_size != num_rbs) {
    throw ConfigError("scheduler.n_rc * scheduler.rc_size must equal the BWP-1 RB count (" +
                      std::to_string(num_rbs) + ")");
  }
  if (c_t > n_rc) throw ConfigError("scheduler.c_t must not exceed scheduler.n_rc");
  if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError("scheduler.p0 must lie in (0, 1)");
  if (r0 < 0.0) throw ConfigError("scheduler.r0 must be >= 0");
  if (max_rbs_per_packet < 1) throw ConfigError("scheduler.max_rbs_per_packet must be >= 1");
}

std::vector<const Packet*> head_of_line(const std::vector<Packet>& sorted) {
  std::vector<const Packet*> out;
  std::set<int> seen;
  for (const auto& p : sorted) {
    if (seen.insert(p.owner).second) out.push_back(&p);
  }
  return out;
}

PairLinkParams pair_params(SchedulerWorld& world, const SchedulerConfig& cfg, int cue, int vue,
                           const std::vector<int>& rbs) {
  PairLinkParams p;
  p.alpha_v = world.gains.vue_link[static_cast<std::size_t>(vue)];
  p.alpha_cv = world.gains.cue_to_vue(cue, vue);
  p.alpha_tilde_v = world.gains.vue_gnb[static_cast<std::size_t>(vue)];
  p.alpha_cz = world.gains.cue_gnb[static_cast<std::size_t>(cue)];
  double hv = 0.0;
  double hcv = 0.0;
  double hcz = 0.0;
  double htv = 0.0;
  for (int rb : rbs) {
    const auto own = world.channel.vue_link(vue, rb);
    const auto cross = world.channel.cue_vue(cue, vue, rb);
    p.eps_v = own.epsilon;
    p.eps_cv = cross.epsilon;
    hv += own.h_hat_sq;
    hcv += cross.h_hat_sq;
    hcz += world.channel.cue_gnb(cue, rb);
    htv += world.channel.vue_gnb(vue, rb);
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, rbs.size()));
  p.h_v_sq = hv / n;
  p.h_cv_sq = hcv / n;
  p.h_cz_sq = hcz / n;
  p.h_tilde_v_sq = htv / n;
  p.noise_vue_mw = world.noise_vue_mw;
  p.noise_gnb_mw = world.noise_gnb_mw;
  p.gamma0 = db_to_linear(cfg.gamma0_db);
  p.p0 = cfg.p0;
  p.pc_max_mw = world.pmax_mw;
  p.pv_max_mw = world.pmax_mw;
  return p;
}

double cue_rb_sinr(SchedulerWorld& world, int cue, double pc, int rb, int vue, double pv) {
  const double gain = world.gains.cue_gnb[static_cast<std::size_t>(cue)];
  if (vue < 0) return cue_sinr(pc, gain, world.channel.cue_gnb(cue, rb), world.noise_gnb_mw);
  const CueInterferer i{pv, world.gains.vue_gnb[static_cast<std::size_t>(vue)],
                        world.channel.vue_gnb(vue, rb)};
  return cue_sinr(pc, gain, world.channel.cue_gnb(cue, rb), world.noise_gnb_mw, std::span(&i, 1));
}

double vue_rb_sinr(SchedulerWorld& world, int vue, double pv, int rb, int cue, double pc) {
  const double gain = world.gains.vue_link[static_cast<std::size_t>(vue)];
  const auto own = world.channel.vue_link(vue, rb);
  if (cue < 0) return vue_sinr(pv, gain, own, world.noise_vue_mw);
  const VueInterferer i{pc, world.gains.cue_to_vue(cue, vue), world.channel.cue_vue(cue, vue, rb)};
  return vue_sinr(pv, gain, own, world.noise_vue_mw, std::span(&i, 1));
}

AllocationResult grahs_tti(SchedulerWorld& world, const std::vector<Packet>& cue_buffer,
                           const std::vector<Packet>& vue_buffer, const SchedulerConfig& cfg) {
  AllocationResult out;
  const int num_rbs = world.channel.num_rbs();
  std::vector<char> free_rb(static_cast<std::size_t>(num_rbs), 1);
  int free_count = num_rbs;
  std::vector<const Packet*> cue_packets;

  for (const Packet* pk : head_of_line(cue_buffer)) {
    if (static_cast<int>(out.cues.size()) >= cfg.c_t || free_count == 0) break;
    std::vector<RbSnr> cands;
    for (int rb = 0; rb < num_rbs; ++rb) {
      if (!free_rb[static_cast<std::size_t>(rb)]) continue;
      cands.push_back({rb, to_db(cue_rb_sinr(world, pk->owner, world.pmax_mw, rb, -1, 0.0))});
    }
    const auto alloc = min_rb_allocation(cands, pk->bits, cfg.bler_cue, world.table, cue_rb_cap(cfg));
    if (!alloc) continue;
    CueGrant g;
    g.cue = pk->owner;
    g.packet = pk->id;
    g.rbs = alloc->rbs;
    g.mcs = alloc->mcs;
    g.power_mw = world.pmax_mw;
    for (int rb : g.rbs) free_rb[static_cast<std::size_t>(rb)] = 0;
    free_count -= static_cast<int>(g.rbs.size());
    out.cues.push_back(std::move(g));
    cue_packets.push_back(pk);
  }

  const auto vues = head_of_line(vue_buffer);
  if (out.cues.empty() || vues.empty()) return out;

  const auto cand = pair_candidates(world, cfg, out.cues, vues, out.pair_candidates);
  const auto matching = match_pairs(cand, out.cues.size(), vues.size());

  for (const auto& [i, j] : matching.pairs) {
    auto& g = out.cues[static_cast<std::size_t>(i)];
    const Packet* vp = vues[static_cast<std::size_t>(j)];
    const auto& c = cand[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    const int n_c = static_cast<int>(g.rbs.size());

    std::vector<RbSnr> cue_cands;
    for (int rb : g.rbs) {
      cue_cands.push_back({rb, to_db(cue_rb_sinr(world, g.cue, c.pc, rb, vp->owner, c.pv))});
    }
    const auto cue_alloc = min_rb_allocation(cue_cands, cue_packets[static_cast<std::size_t>(i)]->bits,
                                             cfg.bler_cue, world.table, n_c);
    const auto vue_alloc = min_rb_allocation(vue_candidates(world, vp->owner, c.pv, g.rbs, g.cue, c.pc),
                                             vp->bits, cfg.bler_vue, world.table, n_c);
    if (cue_alloc && static_cast<int>(cue_alloc->rbs.size()) < n_c) ++out.cue_rb_shrink_events;
    const bool cue_ok = cue_alloc && static_cast<int>(cue_alloc->rbs.size()) == n_c;
    if (!cue_ok || !vue_alloc) {
      ++out.final_check_failures;
      out.deferred_vues.push_back(vp->owner);
      continue;
    }
    g.power_mw = c.pc;
    g.mcs = cue_alloc->mcs;
    g.paired_vue = vp->owner;
    VueGrant vg;
    vg.vue = vp->owner;
    vg.packet = vp->id;
    vg.rbs = vue_alloc->rbs;
    vg.mcs = vue_alloc->mcs;
    vg.power_mw = c.pv;
    vg.host_cue = g.cue;
    out.vues.push_back(std::move(vg));
  }
  return out;
}

AllocationResult hrahs_tti(SchedulerWorld& world, const std::vector<Packet>& cue_buffer,
                           const std::vector<Packet>& vue_buffer, const SchedulerConfig& cfg) {
  AllocationResult out;
  auto heads = head_of_line(cue_buffer);
  if (static_cast<int>(heads.size()) > cfg.c_t) heads.resize(static_cast<std::size_t>(cfg.c_t));

  auto rc_rbs = [&](int j) {
    std::vector<int> rbs;
    for (int k = 0; k < cfg.rc_size; ++k) rbs.push_back(j * cfg.rc_size + k);
    return rbs;
  };

  // Rows past the real CUEs are null users with zero weight everywhere.
  WeightMatrix w(cfg.c_t, cfg.n_rc, 0.0);
  std::vector<std::vector<int>> rc_mcs(heads.size(), std::vector<int>(static_cast<std::size_t>(cfg.n_rc), 0));
  for (std::size_t i = 0; i < heads.size(); ++i) {
    const int c = heads[i]->owner;
    const double alpha = world.gains.cue_gnb[static_cast<std::size_t>(c)];
    for (int j = 0; j < cfg.n_rc; ++j) {
      double mean_gain = 0.0;
      for (int rb : rc_rbs(j)) mean_gain += world.channel.cue_gnb(c, rb);
      mean_gain /= static_cast<double>(cfg.rc_size);
      const double snr = world.pmax_mw * alpha * mean_gain / world.noise_gnb_mw;
      const auto mcs = select_mcs(world.table, to_db(snr), cfg.bler_cue);
      if (!mcs || rbs_needed(heads[i]->bits, world.table.row(*mcs).se) > cfg.rc_size) {
        w(static_cast<int>(i), j) = kForbidden;
        continue;
      }
      w(static_cast<int>(i), j) = std::log2(1.0 + snr);
      rc_mcs[i][static_cast<std::size_t>(j)] = *mcs;
    }
  }
  const auto rc_match = max_weight_matching(w);
  for (const auto& [i, j] : rc_match.pairs) {
    if (i >= static_cast<int>(heads.size())) continue;
    CueGrant g;
    g.cue = heads[static_cast<std::size_t>(i)]->owner;
    g.packet = heads[static_cast<std::size_t>(i)]->id;
    g.rbs = rc_rbs(j);
    g.mcs = rc_mcs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    g.power_mw = world.pmax_mw;
    g.rc = j;
    out.cues.push_back(std::move(g));
  }

  const auto vues = head_of_line(vue_buffer);
  if (out.cues.empty() || vues.empty()) return out;

  const auto cand = pair_candidates(world, cfg, out.cues, vues, out.pair_candidates);
  const auto matching = match_pairs(cand, out.cues.size(), vues.size());
  for (const auto& [i, j] : matching.pairs) {
    auto& g = out.cues[static_cast<std::size_t>(i)];
    const Packet* vp = vues[static_cast<std::size_t>(j)];
    const auto& c = cand[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    const auto vue_alloc = min_rb_allocation(vue_candidates(world, vp->owner, c.pv, g.rbs, g.cue, c.pc),
                                             vp->bits, cfg.bler_vue, world.table, cfg.rc_size);
    if (!vue_alloc) {
      ++out.final_check_failures;
      out.deferred_vues.push_back(vp->owner);
      continue;
    }
    g.power_mw = c.pc;
    g.paired_vue = vp->owner;
    VueGrant vg;
    vg.vue = vp->owner;
    vg.packet = vp->id;
    vg.rbs = vue_alloc->rbs;
    vg.mcs = vue_alloc->mcs;
    vg.power_mw = c.pv;
    vg.host_cue = g.cue;
    out.vues.push_back(std::move(vg));
  }
  return out;
}

AllocationResult ora_tti(SchedulerWorld& world, const std::vector<Packet>& cue_buffer,
                         const std::vector<Packet>& vue_buffer, const SchedulerConfig& cfg) {
  AllocationResult out;
  std::vector<Packet> merged;
  for (const Packet* p : head_of_line(cue_buffer)) merged.push_back(*p);
  for (const Packet* p : head_of_line(vue_buffer)) merged.push_back(*p);
  std::sort(merged.begin(), merged.end(), [](const Packet& a, const Packet& b) {
    if (a.deadline() != b.deadline()) return a.deadline() < b.deadline();
    if (a.t_gen != b.t_gen) return a.t_gen < b.t_gen;
    if (a.kind != b.kind) return a.kind == UserKind::kVue;
    if (a.owner != b.owner) return a.owner < b.owner;
    return a.id < b.id;
  });

  const int num_rbs = world.channel.num_rbs();
  std::vector<char> free_rb(static_cast<std::size_t>(num_rbs), 1);
  int free_count = num_rbs;
  for (const auto& pk : merged) {
    if (static_cast<int>(out.cues.size() + out.vues.size()) >= cfg.c_t || free_count == 0) break;
    const bool is_cue = pk.kind == UserKind::kCue;
    std::vector<RbSnr> cands;
    for (int rb = 0; rb < num_rbs; ++rb) {
      if (!free_rb[static_cast<std::size_t>(rb)]) continue;
      const double snr = is_cue ? cue_rb_sinr(world, pk.owner, world.pmax_mw, rb, -1, 0.0)
                                : vue_rb_sinr(world, pk.owner, world.pmax_mw, rb, -1, 0.0);
      cands.push_back({rb, to_db(snr)});
    }
    const auto alloc =
        min_rb_allocation(cands, pk.bits, is_cue ? cfg.bler_cue : cfg.bler_vue, world.table,
                          is_cue ? cue_rb_cap(cfg) : cfg.max_rbs_per_packet);
    if (!alloc) continue;
    for (int rb : alloc->rbs) free_rb[static_cast<std::size_t>(rb)] = 0;
    free_count -= static_cast<int>(alloc->rbs.size());
    if (is_cue) {
      CueGrant g;
      g.cue = pk.owner;
      g.packet = pk.id;
      g.rbs = alloc->rbs;
      g.mcs = alloc->mcs;
      g.power_mw = world.pmax_mw;
      out.cues.push_back(std::move(g));
    } else {
      VueGrant g;
      g.vue = pk.owner;
      g.packet = pk.id;
      g.rbs = alloc->rbs;
      g.mcs = alloc->mcs;
      g.power_mw = world.pmax_mw;
      out.vues.push_back(std::move(g));
    }
  }
  return out;
}

AllocationResult schedule_tti(SchedulerKind kind, SchedulerWorld& world,
                              const std::vector<Packet>& cue_buffer,
                              const std::vector<Packet>& vue_buffer, const SchedulerConfig& cfg) {
  switch (kind) {
    case SchedulerKind::kGrahs:
      return grahs_tti(world, cue_buffer, vue_buffer, cfg);
    case SchedulerKind::kHrahs:
      return hrahs_tti(world, cue_buffer, vue_buffer, cfg);
    case SchedulerKind::kOra:
      return ora_tti(world, cue_buffer, vue_buffer, cfg);
  }
  return {};
}

std::vector<int> max_ci_allocate(const std::vector<std::vector<double>>& snr) {
  if (snr.empty()) return {};
  const std::size_t rbs = snr.front().size();
  std::vector<int> owner(rbs, -1);
  for (std::size_t rb = 0; rb < rbs; ++rb) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < snr.size(); ++u) {
      if (snr[u][rb] > best) {
        best = snr[u][rb];
        owner[rb] = static_cast<int>(u);
      }
    }
  }
  return owner;
}

std::vector<std::string> check_allocation(const AllocationResult& a, SchedulerKind kind,
                                          const SchedulerConfig& cfg, int num_rbs,
                                          double pmax_mw) {
  std::vector<std::string> v;
  auto fail = [&](const std::string& s) { v.push_back(s); };
  const double pmax = pmax_mw * (1.0 + 1e-12);

  const int users = static_cast<int>(a.cues.size() + (kind == SchedulerKind::kOra ? a.vues.size() : 0));
  if (users > cfg.c_t) fail("per-TTI user cap exceeded: " + std::to_string(users));

  std::vector<int> rb_owner(static_cast<std::size_t>(num_rbs), -1);
  std::map<int, const CueGrant*> by_cue;
  for (const auto& g : a.cues) {
    if (!by_cue.emplace(g.cue, &g).second) fail("CUE " + std::to_string(g.cue) + " granted twice");
    if (g.rbs.empty()) fail("CUE " + std::to_string(g.cue) + " granted no RBs");
    if (!(g.power_mw >= 0.0 && g.power_mw <= pmax)) fail("CUE power outside box");
    if (kind != SchedulerKind::kHrahs && static_cast<int>(g.rbs.size()) > cue_rb_cap(cfg)) {
      fail("CUE " + std::to_string(g.cue) + " exceeds the per-packet RB cap");
    }
    if (kind == SchedulerKind::kHrahs) {
      if (g.rc < 0 || g.rc >= cfg.n_rc) {
        fail("CUE " + std::to_string(g.cue) + " has no valid RC");
      } else {
        for (int rb : g.rbs) {
          if (rb / cfg.rc_size != g.rc) fail("CUE RB outside its RC");
        }
      }
    }
    for (int rb : g.rbs) {
      if (rb < 0 || rb >= num_rbs) {
        fail("RB index out of range");
        continue;
      }
      auto& o = rb_owner[static_cast<std::size_t>(rb)];
      if (o != -1) fail("RB " + std::to_string(rb) + " assigned to more than one CUE");
      o = g.cue;
    }
  }

  std::set<int> vue_seen;
  std::set<int> hosts;
  std::vector<char> dedicated(static_cast<std::size_t>(num_rbs), 0);
  for (const auto& g : a.vues) {
    if (!vue_seen.insert(g.vue).second) fail("VUE " + std::to_string(g.vue) + " granted twice");
    if (g.rbs.empty()) fail("VUE " + std::to_string(g.vue) + " granted no RBs");
    if (!(g.power_mw >= 0.0 && g.power_mw <= pmax)) fail("VUE power outside box");
    if (g.host_cue < 0) {
      if (kind != SchedulerKind::kOra) fail("dedicated VUE grant outside ORA");
      for (int rb : g.rbs) {
        if (rb < 0 || rb >= num_rbs) {
          fail("RB index out of range");
          continue;
        }
        if (rb_owner[static_cast<std::size_t>(rb)] != -1 || dedicated[static_cast<std::size_t>(rb)]) {
          fail("dedicated VUE RB " + std::to_string(rb) + " already in use");
        }
        dedicated[static_cast<std::size_t>(rb)] = 1;
      }
      continue;
    }
    if (kind == SchedulerKind::kOra) fail("ORA produced a pairing");
    if (!hosts.insert(g.host_cue).second) fail("CUE hosts more than one VUE");
    const auto it = by_cue.find(g.host_cue);
    if (it == by_cue.end()) {
      fail("VUE paired with an unscheduled CUE");
      continue;
    }
    if (it->second->paired_vue != g.vue) fail("pairing records disagree");
    const int cap = kind == SchedulerKind::kHrahs ? cfg.rc_size : static_cast<int>(it->second->rbs.size());
    if (static_cast<int>(g.rbs.size()) > cap) fail("VUE uses more RBs than the final check allows");
    for (int rb : g.rbs) {
      if (std::find(it->second->rbs.begin(), it->second->rbs.end(), rb) == it->second->rbs.end()) {
        fail("VUE RB outside its host CUE's RBs");
      }
    }
  }
  for (const auto& g : a.cues) {
    if (g.paired_vue >= 0 && !vue_seen.count(g.paired_vue)) fail("CUE pairing without a VUE grant");
  }
  return v;
}

}  // namespace v2x
