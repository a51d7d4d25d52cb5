#include "v2x/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "v2x/rng.hpp"
#include "v2x/units.hpp"

namespace v2x {

namespace {

enum class ShadowKind : std::uint64_t { kCueGnb = 11, kBueGnb, kVueLink, kVueGnb, kCueVue };

double shadow_draw(std::uint64_t seed, ShadowKind kind, std::uint64_t a, std::uint64_t b,
                   double sigma_db) {
  const std::uint64_t key =
      hash_combine(hash_combine(hash_combine(seed, static_cast<std::uint64_t>(kind)), a), b);
  // Re(CN(0,1)) is N(0, 1/2).
  return sigma_db * std::sqrt(2.0) * keyed_complex_normal(key).real();
}

constexpr int kMaxRejections = 100000;

Point2 uniform_outside_lanes(const ScenarioConfig& config, std::mt19937_64& rng) {
  const double half = config.area_side_m / 2.0;
  std::uniform_real_distribution<double> coord(-half, half);
  for (int i = 0; i < kMaxRejections; ++i) {
    const Point2 p{coord(rng), coord(rng)};
    if (!in_lane_strip(config, p)) {
      return p;
    }
  }
  throw ConfigError("could not place a user outside the lane strip");
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(area_side_m > 0.0)) throw ConfigError("scenario.area_side_m must be > 0");
  if (lane_count < 0 || lane_count % 2 != 0) {
    throw ConfigError("scenario.lane_count must be even and >= 0");
  }
  if (!(lane_width_m > 0.0)) throw ConfigError("scenario.lane_width_m must be > 0");
  if (lane_offset_south_m < 0.0) throw ConfigError("scenario.lane_offset_south_m must be >= 0");
  if (num_cues < 0 || num_vue_pairs < 0 || num_bues < 0) {
    throw ConfigError("scenario user counts must be >= 0");
  }
  if (!(vehicle_speed_mps > 0.0)) throw ConfigError("scenario.vehicle_speed_mps must be > 0");
  if (!(carrier_freq_bwp1_ghz > 0.0) || !(carrier_freq_bwp2_ghz > 0.0)) {
    throw ConfigError("scenario carrier frequencies must be > 0");
  }
  if (!(min_link_distance_m > 0.0)) throw ConfigError("scenario.min_link_distance_m must be > 0");
  if (shadowing_v2v_db < 0.0 || shadowing_v2i_db < 0.0) {
    throw ConfigError("scenario shadowing deviations must be >= 0");
  }
  if (!(vue_gap_cap_m > 0.0) || !(vue_headway_s > 0.0)) {
    throw ConfigError("scenario VUE gap parameters must be > 0");
  }
  const double strip_bottom = lane_offset_south_m + lane_count * lane_width_m;
  if (num_vue_pairs > 0 && lane_count == 0) {
    throw ConfigError("VUE pairs requested but no lanes configured");
  }
  if (strip_bottom >= area_side_m / 2.0) {
    throw ConfigError("area too small: lane strip of " + std::to_string(strip_bottom) +
                      " m does not fit south of the gNB within a " +
                      std::to_string(area_side_m) + " m square");
  }
}

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double vehicle_density(double speed_mps) { return 5.0 / (2.5 * 18.0 * speed_mps); }

double pathloss_db(PathlossModel model, double distance_m, double fc_ghz,
                   double min_distance_m) {
  const double d = std::max(distance_m, min_distance_m);
  switch (model) {
    case PathlossModel::kCellular:
      return 32.4 + 20.0 * std::log10(fc_ghz) + 30.0 * std::log10(d);
    case PathlossModel::kSidelink:
      return 36.85 + 30.0 * std::log10(d) + 18.9 * std::log10(fc_ghz);
  }
  return 0.0;
}

double large_scale_gain(double pathloss, double shadowing_db, double tx_gain_dbi,
                        double rx_gain_dbi) {
  return db_to_linear(tx_gain_dbi + rx_gain_dbi - pathloss - shadowing_db);
}

bool in_lane_strip(const ScenarioConfig& config, Point2 p) {
  const double top = -config.lane_offset_south_m;
  const double bottom = top - config.lane_count * config.lane_width_m;
  return p.y <= top && p.y >= bottom;
}

double lane_center_y(const ScenarioConfig& config, int lane) {
  return -config.lane_offset_south_m - config.lane_width_m * (lane + 0.5);
}

UserDrop drop_users(const ScenarioConfig& config, std::mt19937_64& rng) {
  config.validate();
  // One sub-stream per population: growing the CUE count keeps BUEs and
  // vehicles where they were.
  std::mt19937_64 cue_rng(rng());
  std::mt19937_64 bue_rng(rng());
  std::mt19937_64 vue_rng(rng());

  UserDrop drop;
  drop.cue_positions.reserve(static_cast<std::size_t>(config.num_cues));
  for (int c = 0; c < config.num_cues; ++c) {
    drop.cue_positions.push_back(uniform_outside_lanes(config, cue_rng));
  }
  for (int m = 0; m < config.num_bues; ++m) {
    drop.bue_positions.push_back(uniform_outside_lanes(config, bue_rng));
  }

  if (config.num_vue_pairs == 0) {
    return drop;
  }

  // Spatial Poisson process per lane; the configured pair count wins, the
  // process only decides where vehicles sit.
  const double half = config.area_side_m / 2.0;
  std::uniform_real_distribution<double> along(-half, half);
  std::poisson_distribution<int> per_lane(vehicle_density(config.vehicle_speed_mps) *
                                          config.area_side_m);
  struct Slot {
    int lane;
    double x;
  };
  std::vector<Slot> pool;
  for (int lane = 0; lane < config.lane_count; ++lane) {
    const int n = per_lane(vue_rng);
    for (int i = 0; i < n; ++i) {
      pool.push_back({lane, along(vue_rng)});
    }
  }
  std::uniform_int_distribution<int> any_lane(0, config.lane_count - 1);
  while (static_cast<int>(pool.size()) < config.num_vue_pairs) {
    const int lane = any_lane(vue_rng);
    pool.push_back({lane, along(vue_rng)});
  }
  // Partial Fisher-Yates: the first num_vue_pairs entries are a uniform subset.
  for (int i = 0; i < config.num_vue_pairs; ++i) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i),
                                                    pool.size() - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[pick(vue_rng)]);
  }

  std::exponential_distribution<double> gap_dist(
      1.0 / (config.vue_headway_s * config.vehicle_speed_mps));
  for (int v = 0; v < config.num_vue_pairs; ++v) {
    const Slot s = pool[static_cast<std::size_t>(v)];
    const int heading = s.lane < config.lane_count / 2 ? 1 : -1;
    const double y = lane_center_y(config, s.lane);
    const double gap = std::min(gap_dist(vue_rng), config.vue_gap_cap_m);
    double rx_x = s.x + heading * gap;
    if (rx_x > half || rx_x < -half) {
      rx_x = s.x - heading * gap;
    }
    drop.vue_tx_positions.push_back({s.x, y});
    drop.vue_rx_positions.push_back({rx_x, y});
    drop.vue_lanes.push_back(s.lane);
    drop.vue_headings.push_back(heading);
  }
  return drop;
}

LargeScaleGains compute_gains(const ScenarioConfig& config, const UserDrop& drop,
                              std::uint64_t shadowing_seed) {
  const Point2 gnb{0.0, 0.0};
  const double fc1 = config.carrier_freq_bwp1_ghz;
  const double fc2 = config.carrier_freq_bwp2_ghz;
  const double g_ue = config.vehicle_antenna_gain_dbi;
  const double g_bs = config.gnb_antenna_gain_dbi;
  const double dmin = config.min_link_distance_m;

  LargeScaleGains g;
  const auto num_vues = drop.vue_tx_positions.size();
  g.num_vues = static_cast<int>(num_vues);

  for (std::size_t c = 0; c < drop.cue_positions.size(); ++c) {
    const double pl =
        pathloss_db(PathlossModel::kCellular, distance(drop.cue_positions[c], gnb), fc1, dmin);
    const double sh =
        shadow_draw(shadowing_seed, ShadowKind::kCueGnb, c, 0, config.shadowing_v2i_db);
    g.cue_gnb.push_back(large_scale_gain(pl, sh, g_ue, g_bs));
  }
  for (std::size_t m = 0; m < drop.bue_positions.size(); ++m) {
    const double pl =
        pathloss_db(PathlossModel::kCellular, distance(drop.bue_positions[m], gnb), fc2, dmin);
    const double sh =
        shadow_draw(shadowing_seed, ShadowKind::kBueGnb, m, 0, config.shadowing_v2i_db);
    g.bue_gnb.push_back(large_scale_gain(pl, sh, g_ue, g_bs));
  }
  for (std::size_t v = 0; v < num_vues; ++v) {
    const double pl_link =
        pathloss_db(PathlossModel::kSidelink,
                    distance(drop.vue_tx_positions[v], drop.vue_rx_positions[v]), fc1, dmin);
    const double sh_link =
        shadow_draw(shadowing_seed, ShadowKind::kVueLink, v, 0, config.shadowing_v2v_db);
    g.vue_link.push_back(large_scale_gain(pl_link, sh_link, g_ue, g_ue));

    const double pl_gnb =
        pathloss_db(PathlossModel::kCellular, distance(drop.vue_tx_positions[v], gnb), fc1, dmin);
    const double sh_gnb =
        shadow_draw(shadowing_seed, ShadowKind::kVueGnb, v, 0, config.shadowing_v2i_db);
    g.vue_gnb.push_back(large_scale_gain(pl_gnb, sh_gnb, g_ue, g_bs));
  }
  g.cue_vue.reserve(drop.cue_positions.size() * num_vues);
  for (std::size_t c = 0; c < drop.cue_positions.size(); ++c) {
    for (std::size_t v = 0; v < num_vues; ++v) {
      const double pl = pathloss_db(PathlossModel::kSidelink,
                                    distance(drop.cue_positions[c], drop.vue_rx_positions[v]),
                                    fc1, dmin);
      const double sh =
          shadow_draw(shadowing_seed, ShadowKind::kCueVue, c, v, config.shadowing_v2v_db);
      g.cue_vue.push_back(large_scale_gain(pl, sh, g_ue, g_ue));
    }
  }
  return g;
}

Scenario build_scenario(const ScenarioConfig& config) {
  auto rng = make_stream(config.rng_seed, Stream::kDrop);
  Scenario s;
  s.config = config;
  s.drop = drop_users(config, rng);
  s.gains = compute_gains(config, s.drop,
                          hash_combine(config.rng_seed, static_cast<std::uint64_t>(Stream::kShadowing)));
  return s;
}

}  // namespace v2x
