#pragma once

#include <string>

#include "gpbandit/common.hpp"
#include "gpbandit/kernels.hpp"

namespace gpb {

// Which hardness result a BoundSpec evaluates.
//   StandardSimple      - sample complexity needed to report an eps-optimal
//                         point with confidence 1 - delta.
//   StandardCumulative  - cumulative-regret floor over a horizon T.
//   CorruptedSamples    - cumulative-regret floor against a budget-C
//                         observation corrupter (deterministic players).
//   CorruptedFinalPoint - sample complexity when the reported point must be
//                         good under any perturbation within an l2-ball of
//                         radius xi.
enum class BoundSetting {
  StandardSimple,
  StandardCumulative,
  CorruptedSamples,
  CorruptedFinalPoint,
};

std::string to_string(BoundSetting s);
BoundSetting bound_setting_from_string(const std::string& s);

struct BoundSpec {
  BoundSetting setting = BoundSetting::StandardSimple;
  KernelFamily family = KernelFamily::SE;
  double epsilon = 0.1;
  double B = 1.0;
  double noise_var = 1.0;
  double delta = 0.1;
  int dim = 1;
  double nu = 2.5;
  double lengthscale = 0.2;
  double C = 0.0;
  double xi = 0.0;
  double T = 0.0;
  // Every asymptotic statement is evaluated with an explicit constant factor;
  // comparisons should use shapes and ratios, never absolute values.
  double knob = 1.0;
  // The corrupted-samples result assumes the budget is neither constant-per-
  // round nor a constant: by default C <= sqrt(T) is enforced, and setting
  // this flag records that the caller takes responsibility for a larger C.
  bool allow_large_c = false;
  // The cumulative bounds assume sigma^2 log(1/delta) / B^2 is small relative
  // to the horizon; by default a unit-constant version of that check is
  // enforced, and this flag records a caller override.
  bool assert_scaling_ok = false;
};

// KL divergence between two Gaussians with common variance.
double kl_gaussian(double mu1, double mu2, double sigma_sq);

struct RelatingCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Change-of-measure inequality linking expected visit counts under one
// instance to the confusion divergences of another: sum_j EN[j]*Dbar[j] must
// reach log(1/(2.4 delta)) whenever the algorithm separates the two instances
// with confidence 1 - delta.  The caller is responsible for checking that
// separation empirically before reading holds=false as a violation.
RelatingCheck relating_check(const Vec& EN, const Vec& Dbar, double delta);

// Upper bound on D(P0 || Pm) as sum_j E0[N_j] * Dbar_m^j; feeds the total-
// variation bound |E_m[a] - E_0[a]| <= A sqrt(D).
double divergence_decomposition(const Vec& EN0, const Vec& Dbar_m);

// Evaluates the lower-bound expression for the given setting and kernel
// family, with spec.knob as the implied constant.  Sample-complexity settings
// return a required T; cumulative settings return a regret value.
double lower_bound(const BoundSpec& spec);

// C1 = 8 / log(1 + 1/noise_var), the constant of the GP-UCB regret bound.
double c1_constant(double noise_var);

// GP-UCB cumulative regret bound sqrt(C1 * T * beta_T * gamma_T).
double upper_bound_gpucb(double T, double B, double noise_var, double delta,
                         double gamma_T);

}  // namespace gpb
