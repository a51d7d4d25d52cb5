#include "v2x/link_adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "v2x/units.hpp"

namespace v2x {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',' || ch == ';' || ch == '\t') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  out.push_back(trim(field));
  return out;
}

}  // namespace

BlerTarget parse_bler_target(const std::string& text) {
  if (text == "0.1") return BlerTarget::kTenPercent;
  if (text == "0.01") return BlerTarget::kOnePercent;
  throw ConfigError("unsupported BLER target '" + text + "' (expected 0.1 or 0.01)");
}

std::string to_string(BlerTarget target) {
  return target == BlerTarget::kTenPercent ? "0.1" : "0.01";
}

McsTable McsTable::standard() {
  return McsTable({
      {1, "QPSK", 0.15, -6.5, -2.5},   {2, "QPSK", 0.23, -4.0, 0.0},
      {3, "QPSK", 0.38, -2.6, 1.4},    {4, "QPSK", 0.60, -1.0, 3.0},
      {5, "QPSK", 0.88, 1.0, 5.0},     {6, "QPSK", 1.18, 3.0, 7.0},
      {7, "16QAM", 1.48, 6.6, 10.6},   {8, "16QAM", 1.91, 10.0, 14.0},
      {9, "16QAM", 2.41, 11.4, 15.4},  {10, "64QAM", 2.73, 11.8, 15.8},
      {11, "64QAM", 3.32, 13.0, 17.0}, {12, "64QAM", 3.90, 13.8, 17.8},
      {13, "64QAM", 4.52, 15.6, 19.6}, {14, "64QAM", 5.12, 16.8, 20.8},
      {15, "64QAM", 5.55, 17.6, 21.6},
  });
}

McsTable::McsTable(std::vector<McsRow> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw ConfigError("MCS table is empty");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].index != static_cast<int>(i) + 1) {
      throw ConfigError("MCS table indices must run 1..N in order");
    }
    if (!(rows_[i].se > 0.0)) throw ConfigError("MCS table SE must be > 0");
    if (i > 0) {
      const auto& prev = rows_[i - 1];
      if (!(rows_[i].se > prev.se) || !(rows_[i].snr_bler01_db > prev.snr_bler01_db) ||
          !(rows_[i].snr_bler001_db > prev.snr_bler001_db)) {
        throw ConfigError("MCS table SE and thresholds must be strictly increasing (row " +
                          std::to_string(rows_[i].index) + ")");
      }
    }
  }
}

McsTable McsTable::from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<McsRow> rows;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 5) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                        std::to_string(f.size()));
    }
    McsRow r;
    try {
      r.index = std::stoi(f[0]);
    } catch (const std::exception&) {
      if (rows.empty()) continue;  // header
      throw ConfigError("line " + std::to_string(line_no) + ": bad MCS index '" + f[0] + "'");
    }
    try {
      r.modulation = f[1];
      r.se = std::stod(f[2]);
      r.snr_bler01_db = std::stod(f[3]);
      r.snr_bler001_db = std::stod(f[4]);
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(line_no) + ": malformed number");
    }
    rows.push_back(std::move(r));
  }
  return McsTable(std::move(rows));
}

McsTable McsTable::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open MCS table '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

const McsRow& McsTable::row(int mcs_index) const {
  return rows_.at(static_cast<std::size_t>(mcs_index - 1));
}

std::optional<int> select_mcs(const McsTable& table, double snr_db, BlerTarget target) {
  std::optional<int> best;
  for (const auto& r : table.rows()) {
    if (r.threshold_db(target) <= snr_db) {
      best = r.index;
    } else {
      break;
    }
  }
  return best;
}

double bits_per_rb(double se) { return static_cast<double>(kSymbolsPerRb) * se; }

int rbs_needed(double packet_bits, double se) {
  const double ratio = packet_bits / bits_per_rb(se);
  return static_cast<int>(std::ceil(ratio - 1e-12));
}

std::vector<int> rb_requirements(const McsTable& table, double packet_bits) {
  std::vector<int> out;
  for (const auto& r : table.rows()) out.push_back(rbs_needed(packet_bits, r.se));
  return out;
}

std::optional<RbAllocation> min_rb_allocation(std::span<const RbSnr> candidates,
                                              double packet_bits, BlerTarget target,
                                              const McsTable& table, int max_rbs) {
  struct Ranked {
    int rb;
    int mcs;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (auto mcs = select_mcs(table, c.snr_db, target)) {
      ranked.push_back({c.rb, *mcs});
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    return a.mcs != b.mcs ? a.mcs > b.mcs : a.rb < b.rb;
  });
  const int limit = std::min<int>(max_rbs, static_cast<int>(ranked.size()));
  for (int k = 1; k <= limit; ++k) {
    const auto& weakest = table.row(ranked[static_cast<std::size_t>(k - 1)].mcs);
    if (static_cast<double>(k) * bits_per_rb(weakest.se) >= packet_bits - 1e-9) {
      RbAllocation out;
      out.mcs = weakest.index;
      out.se = weakest.se;
      for (int i = 0; i < k; ++i) out.rbs.push_back(ranked[static_cast<std::size_t>(i)].rb);
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace v2x
