#include "v2x/power_control.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace v2x {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxBisections = 200;
constexpr double kRelTol = 1e-9;
constexpr double kResidualTol = 1e-9;

struct Root {
  double x = 0.0;
  double s = 0.0;  // constraint value at x, <= 0 means satisfied
};

// Bisection on a monotone constraint s(x) with s <= 0 the satisfied side.
// `feasible_high` says whether the satisfied side is the upper end. The caller
// has already checked that the endpoints straddle zero. Returns the satisfied
// endpoint of the final bracket.
Root bisect(const std::function<double(double)>& s, double lo, double hi, bool feasible_high,
            double tol) {
  double good = feasible_high ? hi : lo;
  double bad = feasible_high ? lo : hi;
  double s_good = s(good);
  for (int it = 0; it < kMaxBisections; ++it) {
    if (std::abs(good - bad) <= tol && std::abs(s_good) <= kResidualTol) break;
    const double mid = 0.5 * (good + bad);
    if (mid == good || mid == bad) break;
    const double s_mid = s(mid);
    if (s_mid <= 0.0) {
      good = mid;
      s_good = s_mid;
    } else {
      bad = mid;
    }
  }
  return {good, s_good};
}

}  // namespace

void PairLinkParams::validate() const {
  if (std::abs(eps_v) >= 1.0 || std::abs(eps_cv) >= 1.0) {
    throw DegenerateCsi("correlation coefficient of magnitude 1 leaves no CSI error");
  }
  if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("p0 must lie in (0, 1)");
  if (!(gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be > 0");
  if (!(noise_vue_mw > 0.0) || !(noise_gnb_mw > 0.0)) {
    throw std::invalid_argument("noise powers must be > 0");
  }
  if (!(alpha_v > 0.0) || !(alpha_cv > 0.0) || alpha_tilde_v < 0.0 || alpha_cz < 0.0) {
    throw std::invalid_argument("link gains must be positive");
  }
  if (h_v_sq < 0.0 || h_cv_sq < 0.0 || h_cz_sq < 0.0 || h_tilde_v_sq < 0.0) {
    throw std::invalid_argument("fading magnitudes must be >= 0");
  }
  if (!(pc_max_mw > 0.0) || !(pv_max_mw > 0.0)) {
    throw std::invalid_argument("maximum powers must be > 0");
  }
}

Breakpoints breakpoints(const PairLinkParams& p) {
  p.validate();
  const double ev2 = p.eps_v * p.eps_v;
  const double ecv2 = p.eps_cv * p.eps_cv;
  const double denom = (1.0 - ecv2) / (1.0 - ev2) * (1.0 / p.p0 - 1.0) * p.alpha_cv * ev2 * p.h_v_sq -
                       p.alpha_cv * ecv2 * p.h_cv_sq;
  Breakpoints bp;
  if (!(denom > 0.0)) {
    bp.pc0 = kInf;
    bp.pv0 = kInf;
    return bp;
  }
  bp.pc0 = p.noise_vue_mw / denom;
  bp.pv0 = bp.pc0 * p.gamma0 * p.alpha_cv * (1.0 - ecv2) * (1.0 - p.p0) /
           (p.alpha_v * (1.0 - ev2) * p.p0);
  return bp;
}

OutageTerms outage_terms(const PairLinkParams& p, double pc, double pv) {
  OutageTerms t;
  t.a = pv * p.alpha_v * p.eps_v * p.eps_v * p.h_v_sq;
  t.f = pv * p.alpha_v * (1.0 - p.eps_v * p.eps_v);
  t.g = p.noise_vue_mw + pc * p.alpha_cv * p.eps_cv * p.eps_cv * p.h_cv_sq;
  t.h = pc * p.alpha_cv * (1.0 - p.eps_cv * p.eps_cv);
  return t;
}

double f1_log_gap(const PairLinkParams& p, double pc, double pv) {
  const auto t = outage_terms(p, pc, pv);
  if (!(t.f > 0.0)) return kInf;
  const double g0 = p.gamma0;
  return g0 * t.g / t.f + std::log1p(g0 * t.h / t.f) - (t.a / t.f - std::log1p(-p.p0));
}

double f2_log_gap(const PairLinkParams& p, double pc, double pv) {
  const auto t = outage_terms(p, pc, pv);
  const double g0 = p.gamma0;
  if (!(t.h > 0.0)) return t.a >= g0 * t.g ? kInf : -kInf;
  return std::log1p(t.f / (g0 * t.h)) + (t.a - g0 * t.g) / (g0 * t.h) + std::log(p.p0);
}

double f1(const PairLinkParams& p, double pc, double pv) {
  const auto t = outage_terms(p, pc, pv);
  if (!(t.f > 0.0)) return kInf;
  const double g0 = p.gamma0;
  const double first = std::exp(g0 * t.g / t.f) * (1.0 + g0 * t.h / t.f);
  const double second = std::exp(t.a / t.f) / (1.0 - p.p0);
  if (std::isfinite(first) && std::isfinite(second)) return first - second;
  const double gap = f1_log_gap(p, pc, pv);
  if (gap == 0.0) return 0.0;
  // second * (exp(gap) - 1), which carries the right sign even if it overflows
  return std::exp(t.a / t.f - std::log1p(-p.p0)) * std::expm1(gap);
}

double f2(const PairLinkParams& p, double pc, double pv) {
  const auto t = outage_terms(p, pc, pv);
  const double g0 = p.gamma0;
  if (!(t.h > 0.0)) return t.a >= g0 * t.g ? kInf : -1.0 / p.p0;
  const double first = (1.0 + t.f / (g0 * t.h)) * std::exp((t.a - g0 * t.g) / (g0 * t.h));
  if (std::isfinite(first)) return first - 1.0 / p.p0;
  return std::expm1(f2_log_gap(p, pc, pv)) / p.p0;
}

double outage_probability(const PairLinkParams& p, double pc, double pv) {
  const auto t = outage_terms(p, pc, pv);
  const double g0 = p.gamma0;
  const double k = t.a - g0 * t.g;
  if (k <= 0.0) {
    if (!(t.f > 0.0)) return 1.0;
    return 1.0 - std::exp(k / t.f) / (1.0 + g0 * t.h / t.f);
  }
  if (!(t.h > 0.0)) return 0.0;
  return std::exp(-k / (g0 * t.h)) / (1.0 + t.f / (g0 * t.h));
}

double cue_rate(const PairLinkParams& p, double pc, double pv) {
  const double signal = pc * p.alpha_cz * p.h_cz_sq;
  const double interference = pv * p.alpha_tilde_v * p.h_tilde_v_sq;
  return std::log2(1.0 + signal / (p.noise_gnb_mw + interference));
}

PowerSolution solve_pair_power(const PairLinkParams& p) {
  PowerSolution sol;
  sol.bp = breakpoints(p);
  const double pc_max = p.pc_max_mw;
  const double pv_max = p.pv_max_mw;
  const double tol = kRelTol * std::max(pc_max, pv_max);

  // Both log gaps are oriented so that <= 0 means the outage target holds.
  auto s1 = [&](double pc, double pv) { return f1_log_gap(p, pc, pv); };
  auto s2 = [&](double pc, double pv) { return -f2_log_gap(p, pc, pv); };

  auto infeasible = [&](PowerCase c, const char* why) {
    sol.case_taken = c;
    sol.feasible = false;
    sol.reason = why;
    return sol;
  };

  if (pv_max <= sol.bp.pv0) {
    sol.case_taken = PowerCase::kLowVuePower;
    if (s1(0.0, pv_max) > 0.0) {
      return infeasible(PowerCase::kLowVuePower,
                        "outage target missed at full VUE power without CUE interference");
    }
    if (s1(pc_max, pv_max) <= 0.0) {
      const auto r = bisect([&](double pv) { return s1(pc_max, pv); }, 0.0, pv_max, true, tol);
      sol.p_c_star = pc_max;
      sol.p_v_star = std::min(pv_max, r.x);
      sol.residual = r.s;
    } else {
      double hi = std::min(pc_max, sol.bp.pc0);
      if (s1(hi, pv_max) <= 0.0) hi = pc_max;
      const auto r = bisect([&](double pc) { return s1(pc, pv_max); }, 0.0, hi, false, tol);
      sol.p_c_star = std::min(pc_max, r.x);
      sol.p_v_star = pv_max;
      sol.residual = r.s;
    }
    sol.feasible = true;
    return sol;
  }

  if (pc_max > sol.bp.pc0) {
    sol.case_taken = PowerCase::kHighVuePower;
    if (s2(pc_max, pv_max) <= 0.0) {
      double lo = sol.bp.pv0;
      if (s2(pc_max, lo) <= 0.0) lo = 0.0;
      const auto r = bisect([&](double pv) { return s2(pc_max, pv); }, lo, pv_max, true, tol);
      sol.p_c_star = pc_max;
      sol.p_v_star = std::min(pv_max, r.x);
      sol.residual = -r.s;
    } else {
      double lo = sol.bp.pc0;
      if (s2(lo, pv_max) > 0.0) {
        lo = 0.0;
        if (s2(lo, pv_max) > 0.0) {
          return infeasible(PowerCase::kHighVuePower, "no sign change of F2 in the CUE power bracket");
        }
      }
      const auto r = bisect([&](double pc) { return s2(pc, pv_max); }, lo, pc_max, false, tol);
      sol.p_c_star = std::min(pc_max, r.x);
      sol.p_v_star = pv_max;
      sol.residual = -r.s;
    }
    sol.feasible = true;
    return sol;
  }

  sol.case_taken = PowerCase::kCueAtMax;
  const double hi = std::min(pv_max, sol.bp.pv0);
  if (s1(pc_max, hi) > 0.0) {
    return infeasible(PowerCase::kCueAtMax, "no sign change of F1 below the VUE breakpoint");
  }
  const auto r = bisect([&](double pv) { return s1(pc_max, pv); }, 0.0, hi, true, tol);
  sol.p_c_star = pc_max;
  sol.p_v_star = r.x;
  sol.residual = r.s;
  sol.feasible = true;
  return sol;
}

}  // namespace v2x
