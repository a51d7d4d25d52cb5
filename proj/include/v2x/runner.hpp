#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "v2x/config.hpp"
#include "v2x/metrics.hpp"
#include "v2x/simulation.hpp"

namespace v2x {

struct RunJob {
  std::string group;  // "key=value" for a sweep point, empty otherwise
  SimulationConfig sim;
  std::uint64_t seed = 0;
};

/// One job per (sweep point, seed), sweep-major.
std::vector<RunJob> expand_plan(const RunPlan& plan);

/// Runs every job on up to `workers` threads. Results come back in job order.
/// The first exception thrown by any job is rethrown after all workers stop.
std::vector<RunResult> execute_jobs(const std::vector<RunJob>& jobs, int workers,
                                    const std::atomic<bool>* stop = nullptr);

/// Config echo, seeds, sweep and per-run headline numbers.
nlohmann::json run_summary(const RunPlan& plan, const std::vector<RunResult>& results, bool complete);

/// Rebuilds the plan recorded by run_summary.
RunPlan plan_from_summary(const nlohmann::json& summary);

}  // namespace v2x
