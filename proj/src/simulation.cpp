#include "v2x/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "v2x/channel.hpp"
#include "v2x/link_adaptation.hpp"
#include "v2x/rng.hpp"

namespace v2x {

namespace {

constexpr std::size_t kMaxRecordedViolations = 20;
constexpr int kBwp1Numerology = 3;
constexpr int kBwp2Numerology = 0;

class Run {
 public:
  Run(const SimulationConfig& config, std::uint64_t seed)
      : cfg_(config),
        scenario_(build_with_seed(config, seed)),
        table_(config.radio.mcs_table.empty() ? McsTable::standard()
                                              : McsTable::from_file(config.radio.mcs_table)),
        channel_(hash_combine(seed, static_cast<std::uint64_t>(Stream::kFading)),
                 jakes_epsilon(config.scenario.vehicle_speed_mps,
                               config.scenario.carrier_freq_bwp1_ghz * 1e9,
                               RbGrid{kBwp1Numerology}.tti_ms() * 1e-3),
                 config.radio.bwp1_rbs, config.scenario.num_cues, config.scenario.num_vue_pairs),
        world_{scenario_.gains,
               channel_,
               table_,
               dbm_to_mw(config.scenario.tx_power_dbm),
               dbm_to_mw(config.scenario.noise_power_dbm + config.scenario.noise_figure_bs_db),
               dbm_to_mw(config.scenario.noise_power_dbm + config.scenario.noise_figure_vehicle_db)},
        cue_traffic_(config.scenario.num_cues, config.traffic,
                     hash_combine(seed, static_cast<std::uint64_t>(Stream::kCueTraffic))),
        bue_seed_(hash_combine(seed, static_cast<std::uint64_t>(Stream::kBueFading))),
        gamma0_(db_to_linear(config.scheduler.gamma0_db)) {
    result_.scheduler = to_string(config.kind);
    result_.seed = seed;
    result_.num_cues = config.scenario.num_cues;
    result_.num_vue_pairs = config.scenario.num_vue_pairs;
    result_.cue_ttl_ms = config.traffic.cue_ttl_ms;
    result_.vue_ttl_ms = config.traffic.vue_ttl_ms;
    result_.cues.resize(static_cast<std::size_t>(config.scenario.num_cues));
    result_.vues.resize(static_cast<std::size_t>(config.scenario.num_vue_pairs));
    result_.bue_bits.assign(static_cast<std::size_t>(config.scenario.num_bues), 0.0);
  }

  RunResult execute(const std::atomic<bool>* stop) {
    const Tick end = ms_to_ticks(cfg_.duration_s * 1e3);
    Tick t = 0;
    for (; t < end; ++t) {
      if (stop && stop->load(std::memory_order_relaxed)) {
        result_.complete = false;
        break;
      }
      step(t);
    }
    result_.duration_s = ticks_to_ms(t) * 1e-3;
    return std::move(result_);
  }

 private:
  static Scenario build_with_seed(const SimulationConfig& config, std::uint64_t seed) {
    auto sc = config.scenario;
    sc.rng_seed = seed;
    return build_scenario(sc);
  }

  void violation(Tick t, const std::string& what) {
    ++result_.violation_count;
    if (result_.violations.size() < kMaxRecordedViolations) {
      result_.violations.push_back("tick " + std::to_string(t) + ": " + what);
    }
  }

  void step(Tick t) {
    for (auto& p : cue_traffic_.generate(t, ids_)) {
      result_.cues[static_cast<std::size_t>(p.owner)].generated++;
      ++generated_cue_;
      cue_buf_.push(p);
    }
    for (auto& p : generate_vue_traffic(t, cfg_.scenario.num_vue_pairs, cfg_.traffic, ids_)) {
      result_.vues[static_cast<std::size_t>(p.owner)].generated++;
      ++generated_vue_;
      vue_buf_.push(p);
    }
    for (const auto& p : cue_buf_.expire(t)) result_.cues[static_cast<std::size_t>(p.owner)].dropped++;
    for (const auto& p : vue_buf_.expire(t)) result_.vues[static_cast<std::size_t>(p.owner)].dropped++;
    cue_buf_.sort();
    vue_buf_.sort();

    channel_.set_tti(t);
    const auto alloc = schedule_tti(cfg_.kind, world_, cue_buf_.packets(), vue_buf_.packets(), cfg_.scheduler);
    for (const auto& v : check_allocation(alloc, cfg_.kind, cfg_.scheduler, cfg_.radio.bwp1_rbs, world_.pmax_mw)) {
      violation(t, v);
    }
    apply(t, alloc);
    result_.counters.ttis_bwp1++;

    if (t % kTicksPerMs == 0) max_ci_slot(t / kTicksPerMs);
    check_conservation(t);
  }

  void serve(Tick t, TtlBuffer& buf, std::uint64_t id, UserStats& stats, bool below_gamma0) {
    const auto& ps = buf.packets();
    const auto it = std::find_if(ps.begin(), ps.end(), [id](const Packet& p) { return p.id == id; });
    if (it == ps.end()) {
      violation(t, "granted packet " + std::to_string(id) + " is not buffered");
      return;
    }
    const Tick delay = t + 1 - it->t_gen;
    if (delay > it->ttl) violation(t, "packet " + std::to_string(id) + " served after its TTL");
    stats.served++;
    if (below_gamma0) stats.sinr_failures++;
    stats.delay_ms.push_back(ticks_to_ms(delay));
    buf.remove(id);
  }

  void apply(Tick t, const AllocationResult& alloc) {
    const double tti_s = RbGrid{kBwp1Numerology}.tti_ms() * 1e-3;
    const double bw = RbGrid{kBwp1Numerology}.rb_bandwidth_hz();
    double rbs_this_tti = 0.0;

    for (const auto& g : alloc.cues) {
      const VueGrant* partner = nullptr;
      for (const auto& v : alloc.vues) {
        if (v.host_cue == g.cue) partner = &v;
      }
      for (int rb : g.rbs) {
        const bool shared = partner && std::find(partner->rbs.begin(), partner->rbs.end(), rb) != partner->rbs.end();
        const double sinr = cue_rb_sinr(world_, g.cue, g.power_mw, rb, shared ? partner->vue : -1,
                                        shared ? partner->power_mw : 0.0);
        result_.cue_bits += rb_rate_bps(sinr, bw) * tti_s;
      }
      rbs_this_tti += static_cast<double>(g.rbs.size());
      result_.rbs_per_cue_grant.push_back(static_cast<double>(g.rbs.size()));
      serve(t, cue_buf_, g.packet, result_.cues[static_cast<std::size_t>(g.cue)], false);
    }
    result_.rbs_per_tti.push_back(rbs_this_tti);

    for (const auto& v : alloc.vues) {
      double host_power = 0.0;
      for (const auto& g : alloc.cues) {
        if (g.cue == v.host_cue) host_power = g.power_mw;
      }
      double worst = std::numeric_limits<double>::infinity();
      for (int rb : v.rbs) {
        worst = std::min(worst, vue_rb_sinr(world_, v.vue, v.power_mw, rb, v.host_cue, host_power));
      }
      if (v.host_cue >= 0) result_.counters.pairs_served++;
      serve(t, vue_buf_, v.packet, result_.vues[static_cast<std::size_t>(v.vue)], worst < gamma0_);
    }

    result_.counters.pair_candidates += alloc.pair_candidates;
    result_.counters.final_check_failures += alloc.final_check_failures;
    result_.counters.cue_rb_shrink_events += alloc.cue_rb_shrink_events;
  }

  // BWP-2: every RB to the BUE with the best SNR, one numerology-0 slot long.
  void max_ci_slot(Tick slot) {
    const int bues = cfg_.scenario.num_bues;
    result_.counters.ttis_bwp2++;
    if (bues == 0 || cfg_.radio.bwp2_rbs == 0) return;
    const RbGrid grid{kBwp2Numerology};
    std::vector<std::vector<double>> snr(static_cast<std::size_t>(bues),
                                         std::vector<double>(static_cast<std::size_t>(cfg_.radio.bwp2_rbs)));
    for (int b = 0; b < bues; ++b) {
      for (int rb = 0; rb < cfg_.radio.bwp2_rbs; ++rb) {
        snr[static_cast<std::size_t>(b)][static_cast<std::size_t>(rb)] =
            world_.pmax_mw * scenario_.gains.bue_gnb[static_cast<std::size_t>(b)] *
            bue_fading_sq(bue_seed_, b, rb, slot) / world_.noise_gnb_mw;
      }
    }
    const auto owner = max_ci_allocate(snr);
    for (std::size_t rb = 0; rb < owner.size(); ++rb) {
      const auto b = static_cast<std::size_t>(owner[rb]);
      result_.bue_bits[b] += rb_rate_bps(snr[b][rb], grid.rb_bandwidth_hz()) * grid.tti_ms() * 1e-3;
    }
  }

  void check_conservation(Tick t) {
    std::int64_t served = 0;
    std::int64_t dropped = 0;
    for (const auto& u : result_.cues) {
      served += u.served;
      dropped += u.dropped;
    }
    if (served + dropped + static_cast<std::int64_t>(cue_buf_.size()) != generated_cue_) {
      violation(t, "CUE packet conservation broken");
    }
    served = dropped = 0;
    for (const auto& u : result_.vues) {
      served += u.served;
      dropped += u.dropped;
    }
    if (served + dropped + static_cast<std::int64_t>(vue_buf_.size()) != generated_vue_) {
      violation(t, "VUE packet conservation broken");
    }
  }

  const SimulationConfig& cfg_;
  Scenario scenario_;
  McsTable table_;
  SimulatedChannel channel_;
  SchedulerWorld world_;
  CueTrafficGenerator cue_traffic_;
  std::uint64_t bue_seed_;
  double gamma0_;
  PacketIds ids_;
  TtlBuffer cue_buf_;
  TtlBuffer vue_buf_;
  std::int64_t generated_cue_ = 0;
  std::int64_t generated_vue_ = 0;
  RunResult result_;
};

}  // namespace

void SimulationConfig::validate() const {
  scenario.validate();
  if (!(duration_s > 0.0)) throw ConfigError("run.duration_s must be > 0");
  if (radio.bwp1_rbs < 1) throw ConfigError("radio.bwp1_rbs must be >= 1");
  if (radio.bwp2_rbs < 0) throw ConfigError("radio.bwp2_rbs must be >= 0");
  if (!(traffic.cue_period_ms > 0.0) || !(traffic.vue_period_ms > 0.0)) {
    throw ConfigError("traffic periods must be > 0");
  }
  if (!(traffic.cue_ttl_ms > 0.0) || !(traffic.vue_ttl_ms > 0.0)) throw ConfigError("traffic TTLs must be > 0");
  if (!(traffic.cue_bits > 0.0) || !(traffic.vue_bits > 0.0)) throw ConfigError("traffic packet sizes must be > 0");
  scheduler.validate(radio.bwp1_rbs);
}

RunResult run_simulation(const SimulationConfig& config, std::uint64_t seed,
                         const std::atomic<bool>* stop) {
  config.validate();
  Run run(config, seed);
  return run.execute(stop);
}

}  // namespace v2x
