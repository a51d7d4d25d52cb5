#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "v2x/units.hpp"

namespace v2x {

/// J0 via its power series for |x| <= 8 and the Hankel asymptotic form beyond.
double bessel_j0(double x);

/// Correlation between consecutive CSI reports under Jakes' model:
/// J0(2 pi f_d T) with f_d = speed * f_c / c.
double jakes_epsilon(double speed_mps, double carrier_hz, double period_s);

/// Eager per-(link, RB) Gauss-Markov state: h = eps * h_hat + e.
struct FadingState {
  int num_links = 0;
  int num_rbs = 0;
  std::vector<std::complex<double>> h;
  std::vector<std::complex<double>> h_hat;
  std::vector<std::complex<double>> e;
  std::vector<double> epsilon;     // per link
  std::vector<bool> gnb_visible;   // per link: redrawn every TTI

  FadingState() = default;
  FadingState(std::vector<double> eps, std::vector<bool> visible, int rbs,
              std::mt19937_64& rng);

  std::size_t index(int link, int rb) const {
    return static_cast<std::size_t>(link) * static_cast<std::size_t>(num_rbs) +
           static_cast<std::size_t>(rb);
  }
};

/// One TTI of channel ageing. Returns the evolved state.
FadingState evolve_fading(FadingState state, std::mt19937_64& rng);

/// Squared-magnitude view of an aged link as it enters the VUE SINR:
/// eps^2 |h_hat|^2 + |e|^2.
struct AgedFading {
  double h_hat_sq = 1.0;
  double e_sq = 0.0;
  double epsilon = 1.0;

  double effective() const { return epsilon * epsilon * h_hat_sq + e_sq; }
};

struct CueInterferer {
  double power_mw = 0.0;
  double gain = 0.0;       // large-scale VUE tx -> gNB
  double fading_sq = 0.0;  // |h~|^2
};

struct VueInterferer {
  double power_mw = 0.0;
  double gain = 0.0;  // large-scale CUE -> VUE rx
  AgedFading fading;
};

/// SINR of a CUE on one RB. An empty interferer list gives the plain SNR.
double cue_sinr(double power_mw, double gain, double fading_sq, double noise_mw,
                std::span<const CueInterferer> interferers = {});

/// SINR of a VUE receiver on one RB with aged CSI on both the own and the
/// interfering link.
double vue_sinr(double power_mw, double gain, const AgedFading& own, double noise_mw,
                std::span<const VueInterferer> interferers = {});

/// What a scheduler can read about small-scale fading during one TTI.
/// Implementations may evaluate lazily, so reads are not const.
class ChannelView {
 public:
  virtual ~ChannelView() = default;
  virtual int num_rbs() const = 0;
  virtual double cue_gnb(int cue, int rb) = 0;
  virtual double vue_gnb(int vue, int rb) = 0;
  virtual AgedFading vue_link(int vue, int rb) = 0;
  virtual AgedFading cue_vue(int cue, int vue, int rb) = 0;
};

/// Fading for a whole run. gNB-visible links are i.i.d. per TTI; the two
/// sidelink-facing link families age with the Gauss-Markov recursion. All
/// draws are keyed by (link, RB, TTI), so the realisation does not depend on
/// which links a scheduler happens to inspect.
class SimulatedChannel final : public ChannelView {
 public:
  SimulatedChannel(std::uint64_t seed, double epsilon, int num_rbs, int num_cues,
                   int num_vues);

  void set_tti(Tick t) { now_ = t; }
  Tick tti() const { return now_; }

  int num_rbs() const override { return num_rbs_; }
  double cue_gnb(int cue, int rb) override;
  double vue_gnb(int vue, int rb) override;
  AgedFading vue_link(int vue, int rb) override;
  AgedFading cue_vue(int cue, int vue, int rb) override;

  double epsilon() const { return epsilon_; }

 private:
  struct AgedState {
    Tick t_last = 0;
    bool ready = false;
    std::complex<double> h;
    std::complex<double> h_prev;
  };

  std::complex<double> draw(std::uint64_t family, std::uint64_t link, int rb, Tick t,
                            std::uint64_t salt = 0) const;
  AgedFading advance(AgedState& st, std::uint64_t family, std::uint64_t link, int rb);

  std::uint64_t seed_;
  double epsilon_;
  double innovation_scale_;
  Tick restart_gap_;
  int num_rbs_;
  int num_cues_;
  int num_vues_;
  Tick now_ = 0;
  std::vector<AgedState> vue_states_;
  std::vector<AgedState> cue_vue_states_;
};

/// Rayleigh draws for the BWP-2 best-effort users, i.i.d. per slot and RB.
double bue_fading_sq(std::uint64_t seed, int bue, int rb, Tick slot);

}  // namespace v2x
