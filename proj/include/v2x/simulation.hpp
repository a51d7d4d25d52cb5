#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "v2x/metrics.hpp"
#include "v2x/scenario.hpp"
#include "v2x/schedulers.hpp"
#include "v2x/traffic.hpp"

namespace v2x {

struct RadioConfig {
  int bwp1_rbs = 32;      // numerology 3, 1440 kHz RBs
  int bwp2_rbs = 21;      // numerology 0, 180 kHz RBs
  std::string mcs_table;  // empty for the built-in table
};

struct SimulationConfig {
  ScenarioConfig scenario;
  TrafficConfig traffic;
  RadioConfig radio;
  SchedulerKind kind = SchedulerKind::kGrahs;
  SchedulerConfig scheduler;
  double duration_s = 6.25;

  void validate() const;
};

/// One complete run: drop users, then step BWP-1 every 0.125 ms and BWP-2
/// every 1 ms. The scenario seed in `config` is replaced by `seed`.
/// Setting `*stop` ends the run early with `complete = false`.
RunResult run_simulation(const SimulationConfig& config, std::uint64_t seed,
                         const std::atomic<bool>* stop = nullptr);

}  // namespace v2x
