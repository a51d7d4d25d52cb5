#include "v2x/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace v2x {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string prefix(const RunResult& r) {
  return r.group + "," + r.scheduler + "," + std::to_string(r.seed) + "," + std::to_string(r.num_cues);
}

UserStats pooled(const std::vector<UserStats>& users) {
  UserStats s;
  for (const auto& u : users) {
    s.generated += u.generated;
    s.served += u.served;
    s.dropped += u.dropped;
    s.sinr_failures += u.sinr_failures;
  }
  return s;
}

std::vector<double> all_delays(const std::vector<UserStats>& users) {
  std::vector<double> d;
  for (const auto& u : users) d.insert(d.end(), u.delay_ms.begin(), u.delay_ms.end());
  return d;
}

void write_cdf_rows(std::ostream& os, const std::string& head, const std::string& kind,
                    std::vector<double> samples) {
  for (const auto& [x, f] : empirical_cdf(std::move(samples))) {
    os << head << ',' << kind << ',' << num(x) << ',' << num(f) << '\n';
  }
}

}  // namespace

double UserStats::plr() const {
  return generated > 0 ? static_cast<double>(dropped) / static_cast<double>(generated) : 0.0;
}

double UserStats::mean_delay_ms() const {
  if (delay_ms.empty()) return 0.0;
  return std::accumulate(delay_ms.begin(), delay_ms.end(), 0.0) / static_cast<double>(delay_ms.size());
}

bool is_satisfied(const UserStats& stats, double ttl_ms, const CapacityCriterion& c) {
  if (stats.generated <= 0) throw std::invalid_argument("is_satisfied: user generated no packets");
  return stats.plr() < c.plr_max && stats.mean_delay_ms() <= ttl_ms;
}

double satisfied_fraction(const std::vector<UserStats>& users, double ttl_ms,
                          const CapacityCriterion& c) {
  int census = 0;
  int ok = 0;
  for (const auto& u : users) {
    if (u.generated == 0) continue;
    ++census;
    if (is_satisfied(u, ttl_ms, c)) ++ok;
  }
  return census == 0 ? 1.0 : static_cast<double>(ok) / census;
}

double vue_outage(const std::vector<UserStats>& vues) {
  const auto s = pooled(vues);
  const auto resolved = s.served + s.dropped;
  if (resolved == 0) return 0.0;
  return static_cast<double>(s.dropped + s.sinr_failures) / static_cast<double>(resolved);
}

double rb_rate_bps(double sinr, double bandwidth_hz) {
  return sinr > 0.0 ? bandwidth_hz * std::log2(1.0 + sinr) : 0.0;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> samples) {
  std::vector<std::pair<double, double>> out;
  if (samples.empty()) return out;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    out.emplace_back(samples[i], static_cast<double>(i + 1) / n);
  }
  out.back().second = 1.0;
  return out;
}

double RunResult::cue_sum_rate_bps() const { return duration_s > 0 ? cue_bits / duration_s : 0.0; }

double RunResult::bue_sum_rate_bps() const {
  return duration_s > 0 ? std::accumulate(bue_bits.begin(), bue_bits.end(), 0.0) / duration_s : 0.0;
}

double RunResult::cue_plr() const { return pooled(cues).plr(); }

double RunResult::cue_satisfied_fraction() const { return satisfied_fraction(cues, cue_ttl_ms); }

double RunResult::vue_outage_probability() const { return vue_outage(vues); }

void write_plr_csv(std::ostream& os, const std::vector<RunResult>& runs) {
  os << "group,scheduler,seed,num_cues,kind,generated,served,dropped,pending,plr,mean_delay_ms,"
        "satisfied_fraction\n";
  for (const auto& r : runs) {
    const auto head = prefix(r);
    for (int k = 0; k < 2; ++k) {
      const auto& users = k == 0 ? r.cues : r.vues;
      const auto s = pooled(users);
      const auto d = all_delays(users);
      const double mean = d.empty() ? 0.0 : std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
      os << head << ',' << (k == 0 ? "cue" : "vue") << ',' << s.generated << ',' << s.served << ','
         << s.dropped << ',' << s.pending() << ',' << num(s.plr()) << ',' << num(mean) << ','
         << num(satisfied_fraction(users, k == 0 ? r.cue_ttl_ms : r.vue_ttl_ms)) << '\n';
    }
  }
}

void write_delay_cdf_csv(std::ostream& os, const std::vector<RunResult>& runs) {
  os << "group,scheduler,seed,num_cues,kind,delay_ms,cdf\n";
  for (const auto& r : runs) {
    write_cdf_rows(os, prefix(r), "cue", all_delays(r.cues));
    write_cdf_rows(os, prefix(r), "vue", all_delays(r.vues));
  }
}

void write_sumrate_csv(std::ostream& os, const std::vector<RunResult>& runs) {
  os << "group,scheduler,seed,num_cues,kind,user,rate_bps\n";
  for (const auto& r : runs) {
    const auto head = prefix(r);
    os << head << ",cue_total,-1," << num(r.cue_sum_rate_bps()) << '\n';
    os << head << ",bue_total,-1," << num(r.bue_sum_rate_bps()) << '\n';
    for (std::size_t b = 0; b < r.bue_bits.size(); ++b) {
      os << head << ",bue," << b << ',' << num(r.duration_s > 0 ? r.bue_bits[b] / r.duration_s : 0.0) << '\n';
    }
  }
}

void write_outage_csv(std::ostream& os, const std::vector<RunResult>& runs) {
  os << "group,scheduler,seed,num_cues,num_vue_pairs,resolved,expired,sinr_failures,outage\n";
  for (const auto& r : runs) {
    const auto s = pooled(r.vues);
    os << prefix(r) << ',' << r.num_vue_pairs << ',' << (s.served + s.dropped) << ',' << s.dropped << ','
       << s.sinr_failures << ',' << num(vue_outage(r.vues)) << '\n';
  }
}

void write_rb_cdf_csv(std::ostream& os, const std::vector<RunResult>& runs) {
  os << "group,scheduler,seed,num_cues,kind,rbs,cdf\n";
  for (const auto& r : runs) {
    write_cdf_rows(os, prefix(r), "per_tti", r.rbs_per_tti);
    write_cdf_rows(os, prefix(r), "per_cue", r.rbs_per_cue_grant);
  }
}

void write_metric_files(const std::string& dir, const std::vector<RunResult>& runs) {
  std::filesystem::create_directories(dir);
  const std::pair<const char*, void (*)(std::ostream&, const std::vector<RunResult>&)> files[] = {
      {"plr.csv", write_plr_csv},       {"delay_cdf.csv", write_delay_cdf_csv},
      {"sumrate.csv", write_sumrate_csv}, {"outage.csv", write_outage_csv},
      {"rb_cdf.csv", write_rb_cdf_csv},
  };
  for (const auto& [name, writer] : files) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    writer(os, runs);
  }
}

}  // namespace v2x
