#include "v2x/channel.hpp"

#include <cmath>
#include <limits>

#include "v2x/rng.hpp"

namespace v2x {

namespace {

enum class Family : std::uint64_t { kCueGnb = 101, kVueGnb, kVueLink, kCueVue, kBue };

double j0_series(double x) {
  const double q = -(x * x) / 4.0;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

double j0_asymptotic(double x) {
  const double z = 8.0 * x;
  const double z2 = z * z;
  const double p = 1.0 - 9.0 / (2.0 * z2) + 11025.0 / (24.0 * z2 * z2) -
                   108056025.0 / (720.0 * z2 * z2 * z2);
  const double q = -1.0 / z + 225.0 / (6.0 * z2 * z) - 893025.0 / (120.0 * z2 * z2 * z);
  const double chi = x - kPi / 4.0;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j0(double x) {
  const double ax = std::abs(x);
  return ax <= 8.0 ? j0_series(ax) : j0_asymptotic(ax);
}

double jakes_epsilon(double speed_mps, double carrier_hz, double period_s) {
  const double doppler = speed_mps * carrier_hz / kSpeedOfLight;
  return bessel_j0(2.0 * kPi * doppler * period_s);
}

FadingState::FadingState(std::vector<double> eps, std::vector<bool> visible, int rbs,
                         std::mt19937_64& rng)
    : num_links(static_cast<int>(eps.size())),
      num_rbs(rbs),
      epsilon(std::move(eps)),
      gnb_visible(std::move(visible)) {
  const auto n = static_cast<std::size_t>(num_links) * static_cast<std::size_t>(num_rbs);
  h.resize(n);
  h_hat.resize(n);
  e.assign(n, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = complex_normal(rng);
    h_hat[i] = h[i];
  }
}

FadingState evolve_fading(FadingState state, std::mt19937_64& rng) {
  for (int link = 0; link < state.num_links; ++link) {
    const double eps = state.epsilon[static_cast<std::size_t>(link)];
    const double scale = std::sqrt(std::max(0.0, 1.0 - eps * eps));
    const bool fresh = state.gnb_visible[static_cast<std::size_t>(link)];
    for (int rb = 0; rb < state.num_rbs; ++rb) {
      const std::size_t i = state.index(link, rb);
      state.h_hat[i] = state.h[i];
      if (fresh) {
        state.h[i] = complex_normal(rng);
        state.e[i] = state.h[i] - eps * state.h_hat[i];
      } else {
        state.e[i] = scale * complex_normal(rng);
        state.h[i] = eps * state.h_hat[i] + state.e[i];
      }
    }
  }
  return state;
}

double cue_sinr(double power_mw, double gain, double fading_sq, double noise_mw,
                std::span<const CueInterferer> interferers) {
  double denom = noise_mw;
  for (const auto& i : interferers) {
    denom += i.power_mw * i.gain * i.fading_sq;
  }
  return power_mw * gain * fading_sq / denom;
}

double vue_sinr(double power_mw, double gain, const AgedFading& own, double noise_mw,
                std::span<const VueInterferer> interferers) {
  double denom = noise_mw;
  for (const auto& i : interferers) {
    denom += i.power_mw * i.gain * i.fading.effective();
  }
  return power_mw * gain * own.effective() / denom;
}

SimulatedChannel::SimulatedChannel(std::uint64_t seed, double epsilon, int num_rbs,
                                   int num_cues, int num_vues)
    : seed_(seed),
      epsilon_(epsilon),
      innovation_scale_(std::sqrt(std::max(0.0, 1.0 - epsilon * epsilon))),
      num_rbs_(num_rbs),
      num_cues_(num_cues),
      num_vues_(num_vues) {
  // Beyond this many unobserved TTIs the memory of the old value is below
  // 1e-12 and the link restarts from a stationary draw.
  const double ae = std::abs(epsilon);
  if (ae >= 1.0) {
    restart_gap_ = std::numeric_limits<Tick>::max();
  } else if (ae < 1e-12) {
    restart_gap_ = 1;
  } else {
    restart_gap_ = static_cast<Tick>(std::ceil(std::log(1e-12) / std::log(ae))) + 1;
  }
  vue_states_.resize(static_cast<std::size_t>(num_vues) * static_cast<std::size_t>(num_rbs));
  cue_vue_states_.resize(static_cast<std::size_t>(num_cues) *
                         static_cast<std::size_t>(num_vues) *
                         static_cast<std::size_t>(num_rbs));
}

std::complex<double> SimulatedChannel::draw(std::uint64_t family, std::uint64_t link, int rb,
                                            Tick t, std::uint64_t salt) const {
  std::uint64_t key = hash_combine(seed_, family);
  key = hash_combine(key, link);
  key = hash_combine(key, static_cast<std::uint64_t>(rb));
  key = hash_combine(key, static_cast<std::uint64_t>(t));
  key = hash_combine(key, salt);
  return keyed_complex_normal(key);
}

double SimulatedChannel::cue_gnb(int cue, int rb) {
  return std::norm(draw(static_cast<std::uint64_t>(Family::kCueGnb),
                        static_cast<std::uint64_t>(cue), rb, now_));
}

double SimulatedChannel::vue_gnb(int vue, int rb) {
  return std::norm(draw(static_cast<std::uint64_t>(Family::kVueGnb),
                        static_cast<std::uint64_t>(vue), rb, now_));
}

AgedFading SimulatedChannel::advance(AgedState& st, std::uint64_t family, std::uint64_t link,
                                     int rb) {
  if (!st.ready || now_ - st.t_last > restart_gap_) {
    const Tick start = st.ready ? now_ - restart_gap_ : -1;
    st.t_last = start;
    st.h = draw(family, link, rb, start, 1);
    st.h_prev = st.h;
    st.ready = true;
  }
  while (st.t_last < now_) {
    st.h_prev = st.h;
    ++st.t_last;
    st.h = epsilon_ * st.h + innovation_scale_ * draw(family, link, rb, st.t_last);
  }
  AgedFading out;
  out.epsilon = epsilon_;
  out.h_hat_sq = std::norm(st.h_prev);
  out.e_sq = std::norm(st.h - epsilon_ * st.h_prev);
  return out;
}

AgedFading SimulatedChannel::vue_link(int vue, int rb) {
  auto& st = vue_states_[static_cast<std::size_t>(vue) * static_cast<std::size_t>(num_rbs_) +
                         static_cast<std::size_t>(rb)];
  return advance(st, static_cast<std::uint64_t>(Family::kVueLink),
                 static_cast<std::uint64_t>(vue), rb);
}

AgedFading SimulatedChannel::cue_vue(int cue, int vue, int rb) {
  const std::size_t link =
      static_cast<std::size_t>(cue) * static_cast<std::size_t>(num_vues_) +
      static_cast<std::size_t>(vue);
  auto& st = cue_vue_states_[link * static_cast<std::size_t>(num_rbs_) +
                             static_cast<std::size_t>(rb)];
  return advance(st, static_cast<std::uint64_t>(Family::kCueVue), link, rb);
}

double bue_fading_sq(std::uint64_t seed, int bue, int rb, Tick slot) {
  std::uint64_t key = hash_combine(seed, static_cast<std::uint64_t>(Family::kBue));
  key = hash_combine(key, static_cast<std::uint64_t>(bue));
  key = hash_combine(key, static_cast<std::uint64_t>(rb));
  key = hash_combine(key, static_cast<std::uint64_t>(slot));
  return std::norm(keyed_complex_normal(key));
}

}  // namespace v2x
