#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "v2x/channel.hpp"
#include "v2x/link_adaptation.hpp"
#include "v2x/power_control.hpp"
#include "v2x/scenario.hpp"
#include "v2x/traffic.hpp"

namespace v2x {

enum class SchedulerKind { kGrahs, kHrahs, kOra };

SchedulerKind parse_scheduler(const std::string& name);
std::string to_string(SchedulerKind kind);

struct SchedulerConfig {
  int c_t = 8;        // users per TTI
  int rc_size = 4;    // RBs per resource chunk
  int n_rc = 8;
  double r0 = 0.5;    // bps/Hz per RB
  double gamma0_db = 5.0;
  double p0 = 1e-3;
  BlerTarget bler_cue = BlerTarget::kTenPercent;
  BlerTarget bler_vue = BlerTarget::kOnePercent;
  int max_rbs_per_packet = kMaxRbsPerPacket;
  bool one_rb_only = false;  // schedule a CUE only when one RB carries its packet

  void validate(int num_rbs) const;
};

/// What a scheduler reads: static gains, the fading view for this TTI, the
/// MCS table and the radio constants.
struct SchedulerWorld {
  const LargeScaleGains& gains;
  ChannelView& channel;
  const McsTable& table;
  double pmax_mw = 0.0;
  double noise_gnb_mw = 0.0;
  double noise_vue_mw = 0.0;
};

struct CueGrant {
  int cue = -1;
  std::uint64_t packet = 0;
  std::vector<int> rbs;
  int mcs = 0;
  double power_mw = 0.0;
  int rc = -1;          // resource chunk under HRAHS
  int paired_vue = -1;  // VUE sharing these RBs, if any
};

struct VueGrant {
  int vue = -1;
  std::uint64_t packet = 0;
  std::vector<int> rbs;
  int mcs = 0;
  double power_mw = 0.0;
  int host_cue = -1;  // -1 for dedicated RBs
};

struct AllocationResult {
  std::vector<CueGrant> cues;
  std::vector<VueGrant> vues;
  std::vector<int> deferred_vues;  // paired, then failed the final check

  int pair_candidates = 0;       // (CUE, VUE) power solves with a finite weight
  int final_check_failures = 0;
  int cue_rb_shrink_events = 0;  // interference left fewer RBs needed than granted
};

/// Distinct-owner packets from an EDF-sorted list, first packet per owner.
std::vector<const Packet*> head_of_line(const std::vector<Packet>& sorted);

/// Pair link parameters with fading magnitudes averaged over `rbs`.
PairLinkParams pair_params(SchedulerWorld& world, const SchedulerConfig& cfg, int cue, int vue,
                           const std::vector<int>& rbs);

/// Realised SINR of a CUE on one RB with an optional interfering VUE.
double cue_rb_sinr(SchedulerWorld& world, int cue, double pc, int rb, int vue, double pv);

/// Realised SINR of a VUE on one RB with an optional interfering CUE.
double vue_rb_sinr(SchedulerWorld& world, int vue, double pv, int rb, int cue, double pc);

AllocationResult grahs_tti(SchedulerWorld& world, const std::vector<Packet>& cue_buffer,
                           const std::vector<Packet>& vue_buffer, const SchedulerConfig& cfg);

AllocationResult hrahs_tti(SchedulerWorld& world, const std::vector<Packet>& cue_buffer,
                           const std::vector<Packet>& vue_buffer, const SchedulerConfig& cfg);

AllocationResult ora_tti(SchedulerWorld& world, const std::vector<Packet>& cue_buffer,
                         const std::vector<Packet>& vue_buffer, const SchedulerConfig& cfg);

AllocationResult schedule_tti(SchedulerKind kind, SchedulerWorld& world,
                              const std::vector<Packet>& cue_buffer,
                              const std::vector<Packet>& vue_buffer, const SchedulerConfig& cfg);

/// Max C/I: each RB goes to the user with the highest SNR on it.
/// `snr[user][rb]`; returns the owner of every RB, or -1 with no users.
std::vector<int> max_ci_allocate(const std::vector<std::vector<double>>& snr);

/// Violations of RB exclusivity, pairing cardinality, the per-TTI user cap and
/// the power box. Empty when the allocation is consistent.
std::vector<std::string> check_allocation(const AllocationResult& a, SchedulerKind kind,
                                          const SchedulerConfig& cfg, int num_rbs,
                                          double pmax_mw);

}  // namespace v2x
