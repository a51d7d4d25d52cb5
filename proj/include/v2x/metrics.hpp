#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace v2x {

struct UserStats {
  std::int64_t generated = 0;
  std::int64_t served = 0;
  std::int64_t dropped = 0;
  std::int64_t sinr_failures = 0;  // served, but the delivered SINR was below gamma0
  std::vector<double> delay_ms;

  std::int64_t pending() const { return generated - served - dropped; }
  double plr() const;
  double mean_delay_ms() const;
};

struct CapacityCriterion {
  double plr_max = 0.02;
  double satisfied_fraction = 0.95;
};

/// PLR strictly below the bound and mean delay within the TTL. Throws
/// std::invalid_argument for a user that generated nothing.
bool is_satisfied(const UserStats& stats, double ttl_ms, const CapacityCriterion& c = {});

/// Fraction of users with traffic that are satisfied; users that generated
/// nothing are left out of the census. 1 when nobody generated anything.
double satisfied_fraction(const std::vector<UserStats>& users, double ttl_ms,
                          const CapacityCriterion& c = {});

/// VUE packets not delivered at or above gamma0: expired plus SINR failures,
/// over every packet whose fate is known.
double vue_outage(const std::vector<UserStats>& vues);

/// Shannon rate of one RB.
double rb_rate_bps(double sinr, double bandwidth_hz);

/// Sorted distinct values with the fraction of samples at or below each.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> samples);

struct RunCounters {
  std::int64_t ttis_bwp1 = 0;
  std::int64_t ttis_bwp2 = 0;
  std::int64_t pair_candidates = 0;
  std::int64_t pairs_served = 0;
  std::int64_t final_check_failures = 0;
  std::int64_t cue_rb_shrink_events = 0;
};

/// Everything one simulation run produces.
struct RunResult {
  std::string group;  // sweep point label, empty without a sweep
  std::string scheduler;
  std::uint64_t seed = 0;
  int num_cues = 0;
  int num_vue_pairs = 0;
  double duration_s = 0.0;
  double cue_ttl_ms = 0.0;
  double vue_ttl_ms = 0.0;
  bool complete = true;

  std::vector<UserStats> cues;
  std::vector<UserStats> vues;
  double cue_bits = 0.0;                // Shannon bits over the run
  std::vector<double> bue_bits;         // per BUE
  std::vector<double> rbs_per_tti;      // RBs held by CUEs in each BWP-1 TTI
  std::vector<double> rbs_per_cue_grant;
  RunCounters counters;
  std::vector<std::string> violations;  // first few, with their tick
  std::int64_t violation_count = 0;

  double cue_sum_rate_bps() const;
  double bue_sum_rate_bps() const;
  double cue_plr() const;  // pooled over CUEs
  double cue_satisfied_fraction() const;
  double vue_outage_probability() const;
};

// One CSV family per file; rows from every run in `runs`.
void write_plr_csv(std::ostream& os, const std::vector<RunResult>& runs);
void write_delay_cdf_csv(std::ostream& os, const std::vector<RunResult>& runs);
void write_sumrate_csv(std::ostream& os, const std::vector<RunResult>& runs);
void write_outage_csv(std::ostream& os, const std::vector<RunResult>& runs);
void write_rb_cdf_csv(std::ostream& os, const std::vector<RunResult>& runs);

/// Writes the five per-run CSV files into `dir`, creating it if needed.
void write_metric_files(const std::string& dir, const std::vector<RunResult>& runs);

}  // namespace v2x
