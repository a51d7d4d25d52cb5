#include "v2x/capacity.hpp"

#include <map>
#include <ostream>
#include <stdexcept>

#include "v2x/runner.hpp"

namespace v2x {

CapacityResult capacity_search(const SimulationConfig& base, int lo, int hi,
                               const std::vector<std::uint64_t>& seeds, int workers,
                               const std::atomic<bool>* stop, const CapacityCriterion& criterion) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("capacity_search: need 1 <= lo <= hi");
  if (seeds.empty()) throw std::invalid_argument("capacity_search: no seeds");

  CapacityResult out;
  out.scheduler = to_string(base.kind);
  out.range_min = lo;
  out.range_max = hi;
  std::map<int, bool> known;

  auto probe = [&](int n) {
    if (const auto it = known.find(n); it != known.end()) return it->second;
    std::vector<RunJob> jobs;
    for (auto seed : seeds) {
      SimulationConfig sim = base;
      sim.scenario.num_cues = n;
      jobs.push_back({"", sim, seed});
    }
    CapacityProbe p;
    p.num_cues = n;
    for (const auto& r : execute_jobs(jobs, workers, stop)) {
      p.satisfied_fraction += satisfied_fraction(r.cues, r.cue_ttl_ms, criterion);
      p.cue_plr += r.cue_plr();
    }
    p.satisfied_fraction /= static_cast<double>(seeds.size());
    p.cue_plr /= static_cast<double>(seeds.size());
    p.pass = p.satisfied_fraction >= criterion.satisfied_fraction;
    out.probes.push_back(p);
    known[n] = p.pass;
    return p.pass;
  };

  if (!probe(lo)) {
    out.capacity = lo;
    out.unmet_at_min = true;
    return out;
  }
  if (probe(hi)) {
    out.capacity = hi;
    if (hi > lo) out.neighbors_consistent = probe(hi - 1);
    return out;
  }
  int good = lo;
  int bad = hi;
  while (bad - good > 1) {
    const int mid = good + (bad - good) / 2;
    (probe(mid) ? good : bad) = mid;
  }
  out.capacity = good;
  out.neighbors_consistent = (good == lo || probe(good - 1)) && !probe(good + 1);
  return out;
}

void write_capacity_csv(std::ostream& os, const std::vector<CapacityResult>& results) {
  os << "scheduler,range_min,range_max,capacity,unmet_at_min,neighbors_consistent,probe_cues,"
        "satisfied_fraction,cue_plr,pass\n";
  for (const auto& r : results) {
    for (const auto& p : r.probes) {
      os << r.scheduler << ',' << r.range_min << ',' << r.range_max << ',' << r.capacity << ','
         << (r.unmet_at_min ? 1 : 0) << ',' << (r.neighbors_consistent ? 1 : 0) << ',' << p.num_cues << ','
         << p.satisfied_fraction << ',' << p.cue_plr << ',' << (p.pass ? 1 : 0) << '\n';
    }
  }
}

}  // namespace v2x
