#pragma once

#include <stdexcept>
#include <string>

namespace v2x {

/// Inputs for one CUE-VUE sharing candidate. Powers and noise in mW, gains
/// linear, fading terms are squared magnitudes.
struct PairLinkParams {
  double alpha_v = 0.0;        // VUE tx -> VUE rx
  double alpha_cv = 0.0;       // CUE -> VUE rx
  double alpha_tilde_v = 0.0;  // VUE tx -> gNB
  double alpha_cz = 0.0;       // CUE -> gNB
  double eps_v = 0.0;
  double eps_cv = 0.0;
  double h_v_sq = 1.0;        // |h_hat_v|^2
  double h_cv_sq = 1.0;       // |h_hat_cv|^2
  double h_cz_sq = 1.0;       // |h_cZ|^2
  double h_tilde_v_sq = 1.0;  // |h~_v|^2
  double noise_vue_mw = 0.0;  // at the VUE receiver
  double noise_gnb_mw = 0.0;  // at the gNB
  double gamma0 = 1.0;        // linear
  double p0 = 0.01;
  double pc_max_mw = 0.0;
  double pv_max_mw = 0.0;

  void validate() const;
};

/// Thrown when a correlation coefficient of 1 leaves no estimation error to
/// average over, so the outage expressions are undefined.
class DegenerateCsi : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Breakpoints {
  double pc0 = 0.0;  // +inf when the defining denominator is <= 0
  double pv0 = 0.0;
};

Breakpoints breakpoints(const PairLinkParams& p);

/// The four aggregate terms of the VUE SINR at a power pair.
struct OutageTerms {
  double a = 0.0;
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;
};

OutageTerms outage_terms(const PairLinkParams& p, double pc, double pv);

/// exp(G g0/F)(1 + H g0/F) - exp(A/F)/(1 - p0). Falls back to the log form
/// when the exponentials overflow, keeping the sign exact.
double f1(const PairLinkParams& p, double pc, double pv);

/// (1 + F/(g0 H)) exp((A - G g0)/(g0 H)) - 1/p0, with the same overflow guard.
double f2(const PairLinkParams& p, double pc, double pv);

/// log of the first term of f1 minus log of the second; same sign as f1.
double f1_log_gap(const PairLinkParams& p, double pc, double pv);

/// log of the first term of f2 minus log(1/p0); same sign as f2.
double f2_log_gap(const PairLinkParams& p, double pc, double pv);

/// Exact Pr{gamma_v <= gamma0} when the realised error terms are Rayleigh.
double outage_probability(const PairLinkParams& p, double pc, double pv);

/// CUE spectral efficiency with the paired VUE interfering at the gNB.
double cue_rate(const PairLinkParams& p, double pc, double pv);

enum class PowerCase { kNone = 0, kLowVuePower = 1, kHighVuePower = 2, kCueAtMax = 3 };

struct PowerSolution {
  double p_c_star = 0.0;
  double p_v_star = 0.0;
  PowerCase case_taken = PowerCase::kNone;
  double residual = 0.0;  // log gap of the active constraint at the solution
  bool feasible = false;
  Breakpoints bp;
  std::string reason;  // set when infeasible
};

PowerSolution solve_pair_power(const PairLinkParams& p);

}  // namespace v2x
