#include <cmath>
#include <vector>

#include "doctest.h"
#include "v2x/channel.hpp"
#include "v2x/rng.hpp"

using namespace v2x;

namespace {

// J0 by its defining power series in long double.
double j0_oracle(double x) {
  long double sum = 0.0L;
  long double term = 1.0L;
  const long double q = static_cast<long double>(x) * x / 4.0L;
  for (int k = 0; k < 80; ++k) {
    if (k > 0) term *= -q / (static_cast<long double>(k) * k);
    sum += term;
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("J0 matches the series oracle") {
  for (int i = 0; i < 100; ++i) {
    const double x = 5.0 * i / 99.0;
    CHECK(std::abs(bessel_j0(x) - j0_oracle(x)) < 1e-6);
  }
  for (double x = 5.0; x <= 10.0; x += 0.05) {
    CHECK(std::abs(bessel_j0(x) - j0_oracle(x)) < 1e-6);
  }
  CHECK(bessel_j0(0.0) == 1.0);
  CHECK(std::abs(bessel_j0(2.4048)) < 1e-4);
}

TEST_CASE("Jakes coefficient") {
  CHECK(jakes_epsilon(0.0, 28e9, 0.125e-3) == 1.0);
  const double eps = jakes_epsilon(13.89, 28e9, 0.125e-3);
  const double arg = 2.0 * kPi * 13.89 * 28e9 / 3e8 * 0.125e-3;
  CHECK(arg == doctest::Approx(1.018).epsilon(1e-3));
  CHECK(eps == doctest::Approx(j0_oracle(arg)).epsilon(1e-9));
  CHECK(std::abs(eps - 0.757) < 1e-3);
}

TEST_CASE("Gauss-Markov evolution limits") {
  std::mt19937_64 rng(3);
  FadingState s({1.0, 0.0}, {false, false}, 4, rng);
  const auto before = s.h;
  auto next = evolve_fading(s, rng);
  for (int rb = 0; rb < 4; ++rb) {
    CHECK(next.h[next.index(0, rb)] == before[s.index(0, rb)]);
    CHECK(next.h_hat[next.index(1, rb)] == before[s.index(1, rb)]);
  }
}

TEST_CASE("Gauss-Markov evolution keeps unit power") {
  std::mt19937_64 rng(11);
  FadingState s({0.757, 0.757}, {false, true}, 1, rng);
  double acc_aged = 0.0;
  double acc_fresh = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    s = evolve_fading(std::move(s), rng);
    acc_aged += std::norm(s.h[0]);
    acc_fresh += std::norm(s.h[1]);
  }
  CHECK(std::abs(acc_aged / n - 1.0) < 0.02);
  CHECK(std::abs(acc_fresh / n - 1.0) < 0.02);
}

TEST_CASE("SINR hand cases") {
  CHECK(cue_sinr(4.0, 1.0, 1.0, 1.0) == doctest::Approx(4.0));
  const CueInterferer one{1.0, 1.0, 1.0};
  CHECK(cue_sinr(4.0, 1.0, 1.0, 1.0, std::span(&one, 1)) == doctest::Approx(2.0));
  const CueInterferer silent{0.0, 1.0, 1.0};
  CHECK(cue_sinr(4.0, 1.0, 1.0, 1.0, std::span(&silent, 1)) == doctest::Approx(4.0));

  const AgedFading perfect{2.0, 0.0, 1.0};
  CHECK(vue_sinr(3.0, 0.5, perfect, 1.5) == doctest::Approx(3.0 * 0.5 * 2.0 / 1.5));
  const AgedFading unit{1.0, 0.0, 1.0};
  const VueInterferer vi{1.0, 1.0, unit};
  CHECK(vue_sinr(1.0, 1.0, unit, 1.0, std::span(&vi, 1)) == doctest::Approx(0.5));
  const VueInterferer off{0.0, 1.0, unit};
  CHECK(vue_sinr(1.0, 1.0, unit, 1.0, std::span(&off, 1)) == doctest::Approx(1.0));
}

TEST_CASE("SINR monotonicity on random instances") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const AgedFading own{u(rng), u(rng) * 0.1, 0.8};
    const VueInterferer vi{u(rng), u(rng), AgedFading{u(rng), u(rng) * 0.1, 0.8}};
    const double p = u(rng);
    const double base = vue_sinr(p, 1.0, own, 1.0, std::span(&vi, 1));
    CHECK(vue_sinr(p * 1.5, 1.0, own, 1.0, std::span(&vi, 1)) > base);
    VueInterferer louder = vi;
    louder.power_mw *= 1.5;
    CHECK(vue_sinr(p, 1.0, own, 1.0, std::span(&louder, 1)) < base);

    const CueInterferer ci{u(rng), u(rng), u(rng)};
    const double cb = cue_sinr(p, 1.0, 1.0, 1.0, std::span(&ci, 1));
    CHECK(cue_sinr(p * 1.5, 1.0, 1.0, 1.0, std::span(&ci, 1)) > cb);
    CueInterferer cl = ci;
    cl.power_mw *= 1.5;
    CHECK(cue_sinr(p, 1.0, 1.0, 1.0, std::span(&cl, 1)) < cb);
  }
}

TEST_CASE("simulated channel is independent of access order") {
  SimulatedChannel a(9, 0.757, 4, 3, 2);
  SimulatedChannel b(9, 0.757, 4, 3, 2);
  for (Tick t = 0; t < 20; ++t) {
    a.set_tti(t);
    for (int v = 0; v < 2; ++v) a.vue_link(v, 1);
  }
  b.set_tti(19);
  for (int v = 1; v >= 0; --v) {
    const auto x = b.vue_link(v, 1);
    const auto y = a.vue_link(v, 1);
    CHECK(x.h_hat_sq == doctest::Approx(y.h_hat_sq));
    CHECK(x.e_sq == doctest::Approx(y.e_sq));
  }
  CHECK(a.cue_gnb(2, 3) == b.cue_gnb(2, 3));
}

TEST_CASE("simulated channel aged links keep unit power") {
  SimulatedChannel ch(4, 0.757, 1, 1, 1);
  double acc = 0.0;
  double acc_gnb = 0.0;
  const int n = 50000;
  for (Tick t = 0; t < n; ++t) {
    ch.set_tti(t);
    acc += ch.vue_link(0, 0).effective();
    acc_gnb += ch.cue_gnb(0, 0);
  }
  CHECK(std::abs(acc / n - 1.0) < 0.03);
  CHECK(std::abs(acc_gnb / n - 1.0) < 0.03);
}
