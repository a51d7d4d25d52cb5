#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace v2x {

inline constexpr int kSubcarriersPerRb = 12;
inline constexpr int kSymbolsPerTti = 14;
inline constexpr int kSymbolsPerRb = kSubcarriersPerRb * kSymbolsPerTti;

/// Which SNR threshold column of the MCS table applies.
enum class BlerTarget { kTenPercent, kOnePercent };

BlerTarget parse_bler_target(const std::string& text);
std::string to_string(BlerTarget target);

struct McsRow {
  int index = 0;
  std::string modulation;
  double se = 0.0;            // bits per symbol
  double snr_bler01_db = 0.0;
  double snr_bler001_db = 0.0;

  double threshold_db(BlerTarget target) const {
    return target == BlerTarget::kTenPercent ? snr_bler01_db : snr_bler001_db;
  }
};

class McsTable {
 public:
  /// The 15-row 5G NR table with BLER 0.1 and 0.01 thresholds.
  static McsTable standard();

  /// Delimiter-separated rows `index,modulation,se,snr_bler01_db,snr_bler001_db`.
  /// Blank lines and `#` comments are skipped; an optional header row is allowed.
  static McsTable from_file(const std::string& path);
  static McsTable from_text(const std::string& text);

  explicit McsTable(std::vector<McsRow> rows);

  const std::vector<McsRow>& rows() const { return rows_; }
  const McsRow& row(int mcs_index) const;
  int size() const { return static_cast<int>(rows_.size()); }

 private:
  std::vector<McsRow> rows_;
};

/// Numerology-dependent RB dimensions.
struct RbGrid {
  int numerology = 3;

  double scs_khz() const { return 15.0 * static_cast<double>(1 << numerology); }
  double rb_bandwidth_khz() const { return kSubcarriersPerRb * scs_khz(); }
  double rb_bandwidth_hz() const { return rb_bandwidth_khz() * 1e3; }
  double tti_ms() const { return 1.0 / static_cast<double>(1 << numerology); }
};

/// Highest MCS whose threshold is <= snr_db, or nullopt if none is.
std::optional<int> select_mcs(const McsTable& table, double snr_db, BlerTarget target);

double bits_per_rb(double se);

int rbs_needed(double packet_bits, double se);

/// RBs a packet needs at each MCS row, in table order.
std::vector<int> rb_requirements(const McsTable& table, double packet_bits);

struct RbSnr {
  int rb = 0;
  double snr_db = 0.0;
};

struct RbAllocation {
  std::vector<int> rbs;  // best first
  int mcs = 0;
  double se = 0.0;
};

inline constexpr int kMaxRbsPerPacket = 16;

/// Smallest set of RBs that carries the packet when every RB is driven at the
/// lowest spectral efficiency among the chosen ones. RBs are ranked by
/// achievable SE (ties: lower RB index first) and the top-k prefix is tried for
/// k = 1, 2, ... up to max_rbs.
std::optional<RbAllocation> min_rb_allocation(std::span<const RbSnr> candidates,
                                              double packet_bits, BlerTarget target,
                                              const McsTable& table,
                                              int max_rbs = kMaxRbsPerPacket);

}  // namespace v2x
