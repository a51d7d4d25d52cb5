#include "v2x/runner.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

namespace v2x {

std::vector<RunJob> expand_plan(const RunPlan& plan) {
  std::vector<RunJob> jobs;
  std::vector<std::pair<std::string, SimulationConfig>> points;
  if (plan.sweep) {
    for (const auto& v : plan.sweep->values) {
      RunPlan p = plan;
      set_config_value(p, plan.sweep->key, v);
      points.emplace_back(plan.sweep->key + "=" + v, p.sim);
    }
  } else {
    points.emplace_back("", plan.sim);
  }
  for (const auto& [group, sim] : points) {
    for (auto seed : plan.seeds) jobs.push_back({group, sim, seed});
  }
  return jobs;
}

std::vector<RunResult> execute_jobs(const std::vector<RunJob>& jobs, int workers,
                                    const std::atomic<bool>* stop) {
  std::vector<RunResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        results[i] = run_simulation(jobs[i].sim, jobs[i].seed, stop);
        results[i].group = jobs[i].group;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const int n = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(1, jobs.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

nlohmann::json run_summary(const RunPlan& plan, const std::vector<RunResult>& results, bool complete) {
  nlohmann::json j;
  j["complete"] = complete;
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : config_items(plan)) cfg[k] = v;
  j["config"] = cfg;
  j["seeds"] = plan.seeds;
  j["runs"] = nlohmann::json::array();
  for (const auto& r : results) {
    j["runs"].push_back({
        {"group", r.group},
        {"scheduler", r.scheduler},
        {"seed", r.seed},
        {"num_cues", r.num_cues},
        {"complete", r.complete},
        {"duration_s", r.duration_s},
        {"ttis_bwp1", r.counters.ttis_bwp1},
        {"ttis_bwp2", r.counters.ttis_bwp2},
        {"cue_plr", r.cue_plr()},
        {"cue_satisfied_fraction", r.cue_satisfied_fraction()},
        {"vue_outage", r.vue_outage_probability()},
        {"cue_sum_rate_bps", r.cue_sum_rate_bps()},
        {"bue_sum_rate_bps", r.bue_sum_rate_bps()},
        {"pairs_served", r.counters.pairs_served},
        {"final_check_failures", r.counters.final_check_failures},
        {"cue_rb_shrink_events", r.counters.cue_rb_shrink_events},
        {"invariant_violations", r.violation_count},
    });
  }
  return j;
}

RunPlan plan_from_summary(const nlohmann::json& summary) {
  if (!summary.contains("config") || !summary["config"].is_object()) {
    throw ConfigError("summary has no config object");
  }
  RunPlan plan;
  for (const auto& [k, v] : summary["config"].items()) {
    if (!v.is_string()) throw ConfigError("summary config value for '" + k + "' is not a string");
    set_config_value(plan, k, v.get<std::string>());
  }
  plan.validate();
  return plan;
}

}  // namespace v2x
