#include "gpbandit/bounds.hpp"

#include <cmath>

#include "gpbandit/algorithms.hpp"

namespace gpb {

std::string to_string(BoundSetting s) {
  switch (s) {
    case BoundSetting::StandardSimple: return "standard_simple";
    case BoundSetting::StandardCumulative: return "standard_cumulative";
    case BoundSetting::CorruptedSamples: return "corrupted_samples";
    case BoundSetting::CorruptedFinalPoint: return "corrupted_final_point";
  }
  throw ConfigError("unknown bound setting");
}

BoundSetting bound_setting_from_string(const std::string& s) {
  if (s == "standard_simple") return BoundSetting::StandardSimple;
  if (s == "standard_cumulative") return BoundSetting::StandardCumulative;
  if (s == "corrupted_samples") return BoundSetting::CorruptedSamples;
  if (s == "corrupted_final_point") return BoundSetting::CorruptedFinalPoint;
  throw ConfigError("unknown bound setting: " + s);
}

double kl_gaussian(double mu1, double mu2, double sigma_sq) {
  require_config(sigma_sq > 0, "kl_gaussian needs positive variance");
  double diff = mu1 - mu2;
  return diff * diff / (2.0 * sigma_sq);
}

RelatingCheck relating_check(const Vec& EN, const Vec& Dbar, double delta) {
  require_config(EN.size() == Dbar.size(),
                 "visit-count and divergence vectors differ in length");
  require_config(delta > 0 && delta < 1.0 / 3.0,
                 "relating_check needs delta in (0, 1/3)");
  require_config(EN.size() == 0 || (EN.minCoeff() >= 0 && Dbar.minCoeff() >= 0),
                 "visit counts and divergences must be nonnegative");
  RelatingCheck out;
  out.lhs = EN.dot(Dbar);
  out.rhs = std::log(1.0 / (2.4 * delta));
  out.holds = out.lhs >= out.rhs;
  return out;
}

double divergence_decomposition(const Vec& EN0, const Vec& Dbar_m) {
  require_config(EN0.size() == Dbar_m.size(),
                 "visit-count and divergence vectors differ in length");
  require_config(
      EN0.size() == 0 || (EN0.minCoeff() >= 0 && Dbar_m.minCoeff() >= 0),
      "visit counts and divergences must be nonnegative");
  return EN0.dot(Dbar_m);
}

namespace {

void check_common(const BoundSpec& s) {
  require_config(s.knob > 0, "constant knob must be positive");
  require_config(s.B > 0, "norm budget B must be positive");
  require_config(s.dim >= 1, "dimension must be at least 1");
  if (s.family == KernelFamily::Matern)
    require_config(s.nu > 0, "Matern smoothness must be positive");
}

double log_inv(double delta) { return std::log(1.0 / delta); }

double simple_regret_complexity(const BoundSpec& s) {
  require_config(s.epsilon > 0 && s.epsilon < s.B,
                 "target accuracy must satisfy 0 < epsilon < B");
  require_config(s.noise_var > 0,
                 "sample-complexity bounds need positive noise variance");
  double base = s.noise_var / (s.epsilon * s.epsilon);
  if (s.family == KernelFamily::SE) {
    return s.knob * base *
           std::pow(std::log(s.B / s.epsilon), 0.5 * s.dim) * log_inv(s.delta);
  }
  return s.knob * base * std::pow(s.B / s.epsilon, s.dim / s.nu) *
         log_inv(s.delta);
}

}  // namespace

double lower_bound(const BoundSpec& spec) {
  check_common(spec);
  switch (spec.setting) {
    case BoundSetting::StandardSimple: {
      require_config(spec.delta > 0 && spec.delta < 1.0 / 3.0,
                     "confidence level delta must lie in (0, 1/3)");
      return simple_regret_complexity(spec);
    }
    case BoundSetting::StandardCumulative: {
      require_config(spec.delta > 0 && spec.delta < 1.0 / 3.0,
                     "confidence level delta must lie in (0, 1/3)");
      require_config(spec.T >= 1, "horizon T must be at least 1");
      require_config(spec.noise_var > 0,
                     "cumulative bounds need positive noise variance");
      double noise_term = spec.noise_var * log_inv(spec.delta);
      if (spec.family == KernelFamily::SE) {
        double limit = spec.T;
        require_config(spec.assert_scaling_ok ||
                           noise_term / (spec.B * spec.B) <= limit,
                       "noise-scale condition violated: sigma^2 log(1/delta) "
                       "exceeds B^2 T; set assert_scaling_ok to override");
        double log_arg = spec.B * spec.B * spec.T / noise_term;
        require_config(log_arg > 1.0,
                       "degenerate horizon: B^2 T must exceed "
                       "sigma^2 log(1/delta)");
        return spec.knob *
               std::sqrt(spec.T * spec.noise_var *
                         std::pow(std::log(log_arg), 0.5 * spec.dim) *
                         log_inv(spec.delta));
      }
      double limit = std::pow(spec.T, 1.0 / (2.0 + spec.dim / spec.nu));
      require_config(spec.assert_scaling_ok ||
                         noise_term / (spec.B * spec.B) <= limit,
                     "noise-scale condition violated: sigma^2 log(1/delta) / "
                     "B^2 exceeds T^{1/(2+d/nu)}; set assert_scaling_ok to "
                     "override");
      double expo = 1.0 / (2.0 * spec.nu + spec.dim);
      return spec.knob * std::pow(spec.B, spec.dim * expo) *
             std::pow(spec.T, (spec.nu + spec.dim) * expo) *
             std::pow(noise_term, spec.nu * expo);
    }
    case BoundSetting::CorruptedSamples: {
      require_config(spec.T >= 2, "horizon T must be at least 2");
      require_config(spec.C > 0, "corruption budget C must be positive");
      require_config(spec.allow_large_c || spec.C <= std::sqrt(spec.T),
                     "corruption budget out of range: need C <= sqrt(T), or "
                     "set allow_large_c to record a deliberate override");
      if (spec.family == KernelFamily::SE)
        return spec.knob * spec.C * std::pow(std::log(spec.T), 0.5 * spec.dim);
      return spec.knob * std::pow(spec.C, spec.nu / (spec.dim + spec.nu)) *
             std::pow(spec.T, spec.dim / (spec.dim + spec.nu));
    }
    case BoundSetting::CorruptedFinalPoint: {
      require_config(spec.delta > 0 && spec.delta < 1,
                     "confidence level delta must lie in (0, 1)");
      require_config(spec.xi > 0 && spec.xi < 0.5,
                     "perturbation radius xi must lie in (0, 1/2)");
      require_config(spec.epsilon < 0.5,
                     "target accuracy must satisfy epsilon < 1/2");
      return simple_regret_complexity(spec);
    }
  }
  throw ConfigError("unknown bound setting");
}

double c1_constant(double noise_var) {
  require_config(noise_var > 0, "noise variance must be positive");
  return 8.0 / std::log1p(1.0 / noise_var);
}

double upper_bound_gpucb(double T, double B, double noise_var, double delta,
                         double gamma_T) {
  require_config(T >= 1, "horizon T must be at least 1");
  double beta = beta_t(B, noise_var, gamma_T, delta);
  return std::sqrt(c1_constant(noise_var) * T * beta * gamma_T);
}

}  // namespace gpb
