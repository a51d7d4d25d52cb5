#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "v2x/units.hpp"

namespace v2x {

enum class UserKind { kCue, kVue };

struct Packet {
  std::uint64_t id = 0;
  int owner = 0;
  UserKind kind = UserKind::kCue;
  double bits = 0.0;
  Tick t_gen = 0;
  Tick ttl = 0;

  Tick deadline() const { return t_gen + ttl; }
};

/// Earliest deadline first; ties by generation time, then owner, then id.
bool deadline_before(const Packet& a, const Packet& b);

/// A packet can still be delivered in the TTI starting at `now` if that TTI
/// ends no later than its deadline.
inline bool servable_at(const Packet& p, Tick now) { return now + 1 - p.t_gen <= p.ttl; }

class TtlBuffer {
 public:
  void push(Packet p) { packets_.push_back(p); }
  void push(const std::vector<Packet>& ps) { packets_.insert(packets_.end(), ps.begin(), ps.end()); }

  /// Removes and returns every packet that can no longer meet its deadline.
  std::vector<Packet> expire(Tick now);

  /// Restores earliest-deadline-first order.
  void sort();

  /// Removes the packet with this id; false if absent.
  bool remove(std::uint64_t id);

  const std::vector<Packet>& packets() const { return packets_; }
  std::size_t size() const { return packets_.size(); }
  bool empty() const { return packets_.empty(); }

 private:
  std::vector<Packet> packets_;
};

enum class CueArrivalMode {
  kPoisson,   // aggregate Poisson with mean num_cues / period per ms
  kPeriodic,  // every CUE once per period at a random phase
};

inline constexpr double kCuePacketBits = 400.0;
inline constexpr double kVuePacketBits = 80.0;
inline constexpr double kCuePeriodMs = 20.0;
inline constexpr double kVuePeriodMs = 10.0;
inline constexpr double kCueTtlMs = 50.0;
inline constexpr double kVueTtlMs = 10.0;

struct TrafficConfig {
  CueArrivalMode cue_mode = CueArrivalMode::kPoisson;
  double cue_period_ms = kCuePeriodMs;
  double vue_period_ms = kVuePeriodMs;
  double cue_ttl_ms = kCueTtlMs;
  double vue_ttl_ms = kVueTtlMs;
  double cue_bits = kCuePacketBits;
  double vue_bits = kVuePacketBits;
};

class PacketIds {
 public:
  std::uint64_t next() { return next_++; }

 private:
  std::uint64_t next_ = 0;
};

/// CUE arrivals, drawn once per millisecond.
class CueTrafficGenerator {
 public:
  CueTrafficGenerator(int num_cues, const TrafficConfig& config, std::uint64_t seed);

  /// Packets generated at tick `now`; empty off the millisecond grid.
  std::vector<Packet> generate(Tick now, PacketIds& ids);

 private:
  int num_cues_;
  TrafficConfig config_;
  std::mt19937_64 rng_;
  std::vector<int> pool_;
  std::vector<Tick> phase_;
};

/// Every VUE pair emits one packet on the period grid.
std::vector<Packet> generate_vue_traffic(Tick now, int num_vues, const TrafficConfig& config,
                                         PacketIds& ids);

}  // namespace v2x
