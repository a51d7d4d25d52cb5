#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace v2x {

/// Static world parameters. Defaults reproduce the reference evaluation setup
/// (28 GHz BWP-1, 2 GHz BWP-2, eight 4 m lanes 35 m south of the gNB).
struct ScenarioConfig {
  double area_side_m = 1000.0;
  int lane_count = 8;
  double lane_width_m = 4.0;
  double lane_offset_south_m = 35.0;

  int num_cues = 100;
  int num_vue_pairs = 10;
  int num_bues = 10;

  double vehicle_speed_mps = 50.0 / 3.6;
  double carrier_freq_bwp1_ghz = 28.0;
  double carrier_freq_bwp2_ghz = 2.0;

  double gnb_antenna_gain_dbi = 8.0;
  double vehicle_antenna_gain_dbi = 3.0;
  double noise_figure_bs_db = 5.0;
  double noise_figure_vehicle_db = 9.0;
  double noise_power_dbm = -114.0;
  double tx_power_dbm = 23.0;

  double shadowing_v2v_db = 4.0;
  double shadowing_v2i_db = 7.8;

  // Receiver placement for each VUE pair: exponential gap with mean
  // headway * speed ahead of the transmitter, capped.
  double vue_headway_s = 1.25;
  double vue_gap_cap_m = 50.0;
  double min_link_distance_m = 1.0;

  std::uint64_t rng_seed = 1;

  /// Throws ConfigError when an invariant is violated or the lanes do not fit.
  void validate() const;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point2 a, Point2 b);

struct UserDrop {
  std::vector<Point2> cue_positions;
  std::vector<Point2> bue_positions;
  std::vector<Point2> vue_tx_positions;
  std::vector<Point2> vue_rx_positions;
  std::vector<int> vue_lanes;
  std::vector<int> vue_headings;  // +1 east, -1 west
};

/// Linear power gains (path loss, shadowing, antenna gains) for every link.
/// `cue_vue` is row-major: index cue * num_vues + vue, towards the VUE receiver.
struct LargeScaleGains {
  std::vector<double> cue_gnb;
  std::vector<double> bue_gnb;
  std::vector<double> vue_link;
  std::vector<double> vue_gnb;
  std::vector<double> cue_vue;
  int num_vues = 0;

  double cue_to_vue(int cue, int vue) const {
    return cue_vue[static_cast<std::size_t>(cue) * static_cast<std::size_t>(num_vues) +
                   static_cast<std::size_t>(vue)];
  }
};

enum class PathlossModel {
  kCellular,  // UE to gNB: 32.4 + 20 log10(fc) + 30 log10(d)
  kSidelink,  // UE to UE: 36.85 + 30 log10(d) + 18.9 log10(fc)
};

/// Vehicles per metre of lane for a given speed in m/s.
double vehicle_density(double speed_mps);

/// f_c in GHz, d in metres. Distances below `min_distance_m` are clamped.
double pathloss_db(PathlossModel model, double distance_m, double fc_ghz,
                   double min_distance_m = 1.0);

double large_scale_gain(double pathloss_db, double shadowing_db, double tx_gain_dbi,
                        double rx_gain_dbi);

bool in_lane_strip(const ScenarioConfig& config, Point2 p);
double lane_center_y(const ScenarioConfig& config, int lane);

UserDrop drop_users(const ScenarioConfig& config, std::mt19937_64& rng);

/// Shadowing is drawn once per link from a keyed generator, so a CUE keeps its
/// shadowing when the population around it changes.
LargeScaleGains compute_gains(const ScenarioConfig& config, const UserDrop& drop,
                              std::uint64_t shadowing_seed);

struct Scenario {
  ScenarioConfig config;
  UserDrop drop;
  LargeScaleGains gains;
};

Scenario build_scenario(const ScenarioConfig& config);

}  // namespace v2x
