#include "v2x/traffic.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace v2x {

bool deadline_before(const Packet& a, const Packet& b) {
  return std::make_tuple(a.deadline(), a.t_gen, a.owner, a.id) <
         std::make_tuple(b.deadline(), b.t_gen, b.owner, b.id);
}

std::vector<Packet> TtlBuffer::expire(Tick now) {
  std::vector<Packet> dropped;
  auto keep = std::stable_partition(packets_.begin(), packets_.end(),
                                    [now](const Packet& p) { return servable_at(p, now); });
  dropped.assign(keep, packets_.end());
  packets_.erase(keep, packets_.end());
  return dropped;
}

void TtlBuffer::sort() { std::sort(packets_.begin(), packets_.end(), deadline_before); }

bool TtlBuffer::remove(std::uint64_t id) {
  const auto it =
      std::find_if(packets_.begin(), packets_.end(), [id](const Packet& p) { return p.id == id; });
  if (it == packets_.end()) return false;
  packets_.erase(it);
  return true;
}

CueTrafficGenerator::CueTrafficGenerator(int num_cues, const TrafficConfig& config,
                                         std::uint64_t seed)
    : num_cues_(num_cues), config_(config), rng_(seed), pool_(static_cast<std::size_t>(num_cues)) {
  std::iota(pool_.begin(), pool_.end(), 0);
  if (config_.cue_mode == CueArrivalMode::kPeriodic) {
    const Tick period = ms_to_ticks(config_.cue_period_ms);
    const Tick slots = std::max<Tick>(1, period / kTicksPerMs);
    std::uniform_int_distribution<Tick> phase(0, slots - 1);
    for (int c = 0; c < num_cues_; ++c) phase_.push_back(phase(rng_) * kTicksPerMs);
  }
}

std::vector<Packet> CueTrafficGenerator::generate(Tick now, PacketIds& ids) {
  std::vector<Packet> out;
  if (num_cues_ == 0 || now % kTicksPerMs != 0) return out;
  const Tick ttl = ms_to_ticks(config_.cue_ttl_ms);

  if (config_.cue_mode == CueArrivalMode::kPeriodic) {
    const Tick period = ms_to_ticks(config_.cue_period_ms);
    for (int c = 0; c < num_cues_; ++c) {
      if ((now - phase_[static_cast<std::size_t>(c)]) % period == 0) {
        out.push_back({ids.next(), c, UserKind::kCue, config_.cue_bits, now, ttl});
      }
    }
    return out;
  }

  std::poisson_distribution<int> count(static_cast<double>(num_cues_) / config_.cue_period_ms);
  const int k = std::min(count(rng_), num_cues_);
  // Partial Fisher-Yates: k distinct owners.
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, num_cues_ - 1);
    std::swap(pool_[static_cast<std::size_t>(i)], pool_[static_cast<std::size_t>(pick(rng_))]);
  }
  std::vector<int> owners(pool_.begin(), pool_.begin() + k);
  std::sort(owners.begin(), owners.end());
  for (int c : owners) out.push_back({ids.next(), c, UserKind::kCue, config_.cue_bits, now, ttl});
  return out;
}

std::vector<Packet> generate_vue_traffic(Tick now, int num_vues, const TrafficConfig& config,
                                         PacketIds& ids) {
  std::vector<Packet> out;
  const Tick period = ms_to_ticks(config.vue_period_ms);
  if (period <= 0 || now % period != 0) return out;
  const Tick ttl = ms_to_ticks(config.vue_ttl_ms);
  for (int v = 0; v < num_vues; ++v) {
    out.push_back({ids.next(), v, UserKind::kVue, config.vue_bits, now, ttl});
  }
  return out;
}

}  // namespace v2x
