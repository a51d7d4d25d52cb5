#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "v2x/metrics.hpp"
#include "v2x/simulation.hpp"

namespace v2x {

struct CapacityProbe {
  int num_cues = 0;
  double satisfied_fraction = 0.0;  // mean over seeds
  double cue_plr = 0.0;             // mean over seeds
  bool pass = false;
};

struct CapacityResult {
  std::string scheduler;
  int range_min = 0;
  int range_max = 0;
  int capacity = 0;
  bool unmet_at_min = false;         // even range_min fails; capacity reports range_min
  bool neighbors_consistent = true;  // capacity - 1 passes and capacity + 1 fails
  std::vector<CapacityProbe> probes; // in probing order
};

/// Largest CUE count in [lo, hi] whose seed-averaged satisfied fraction meets
/// the criterion, found by bisection with full runs at every probe.
CapacityResult capacity_search(const SimulationConfig& base, int lo, int hi,
                               const std::vector<std::uint64_t>& seeds, int workers = 1,
                               const std::atomic<bool>* stop = nullptr,
                               const CapacityCriterion& criterion = {});

void write_capacity_csv(std::ostream& os, const std::vector<CapacityResult>& results);

}  // namespace v2x
