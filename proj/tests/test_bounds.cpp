#include <doctest.h>

#include <cmath>

#include "gpbandit/bounds.hpp"
#include "gpbandit/algorithms.hpp"

using namespace gpb;

namespace {

// Numerical KL(p || q) for two Gaussians with shared variance via Simpson
// integration of p log(p/q) over +-12 standard deviations around mu1.
double kl_quadrature(double mu1, double mu2, double sigma_sq) {
  double sd = std::sqrt(sigma_sq);
  auto p = [&](double x) {
    double z = (x - mu1) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
  };
  auto log_ratio = [&](double x) {
    double z1 = (x - mu1) / sd, z2 = (x - mu2) / sd;
    return 0.5 * (z2 * z2 - z1 * z1);
  };
  double lo = mu1 - 12.0 * sd, hi = mu1 + 12.0 * sd;
  const int n = 4000;  // even
  double h = (hi - lo) / n, acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    double x = lo + i * h;
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * p(x) * log_ratio(x);
  }
  return acc * h / 3.0;
}

BoundSpec matern_simple() {
  BoundSpec s;
  s.setting = BoundSetting::StandardSimple;
  s.family = KernelFamily::Matern;
  s.epsilon = 0.05;
  s.B = 1.0;
  s.noise_var = 0.25;
  s.delta = 0.1;
  s.dim = 1;
  s.nu = 1.0;
  return s;
}

}  // namespace

TEST_CASE("Gaussian KL divergence matches quadrature") {
  for (auto [m1, m2, var] : {std::tuple{0.0, 0.1, 0.25},
                             std::tuple{0.3, -0.2, 1.0},
                             std::tuple{1.0, 1.0, 0.5}}) {
    CHECK(kl_gaussian(m1, m2, var) ==
          doctest::Approx(kl_quadrature(m1, m2, var)).epsilon(1e-6));
  }
  CHECK(kl_gaussian(0.1, 0.0, 0.25) == doctest::Approx(0.02));
  CHECK_THROWS_AS(kl_gaussian(0.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("change-of-measure check on hand values") {
  Vec EN(2), D(2);
  EN << 5.0, 3.0;
  D << 0.2, 0.4;
  RelatingCheck c = relating_check(EN, D, 0.1);
  CHECK(c.lhs == doctest::Approx(2.2));
  CHECK(c.rhs == doctest::Approx(std::log(1.0 / 0.24)));
  CHECK(c.holds);
  // Tiny visit counts cannot reach the threshold.
  EN << 0.1, 0.0;
  RelatingCheck f = relating_check(EN, D, 0.1);
  CHECK_FALSE(f.holds);
  CHECK_THROWS_AS(relating_check(EN, D, 0.4), ConfigError);
  Vec bad(2);
  bad << -1.0, 0.0;
  CHECK_THROWS_AS(relating_check(bad, D, 0.1), ConfigError);
}

TEST_CASE("divergence decomposition is the weighted sum") {
  Vec EN(3), D(3);
  EN << 10.0, 0.0, 2.0;
  D << 0.01, 5.0, 0.5;
  CHECK(divergence_decomposition(EN, D) == doctest::Approx(1.1));
}

TEST_CASE("sample-complexity floor matches independently written formulas") {
  BoundSpec s = matern_simple();
  double expect = (0.25 / 0.0025) * std::pow(1.0 / 0.05, 1.0) *
                  std::log(10.0);
  CHECK(lower_bound(s) == doctest::Approx(expect).epsilon(1e-12));
  s.nu = 2.5;
  s.dim = 2;
  s.knob = 0.7;
  expect = 0.7 * (0.25 / 0.0025) * std::pow(20.0, 2.0 / 2.5) * std::log(10.0);
  CHECK(lower_bound(s) == doctest::Approx(expect).epsilon(1e-12));
  BoundSpec se = s;
  se.family = KernelFamily::SE;
  expect = 0.7 * (0.25 / 0.0025) * std::pow(std::log(20.0), 1.0) *
           std::log(10.0);
  CHECK(lower_bound(se) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("confidence scaling multiplies by log(1/delta)") {
  BoundSpec s = matern_simple();
  double at_01 = lower_bound(s);
  s.delta = 0.01;
  CHECK(lower_bound(s) / at_01 ==
        doctest::Approx(std::log(100.0) / std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("halving the accuracy target scales by 2^(2 + d/nu)") {
  BoundSpec s = matern_simple();
  double at_eps = lower_bound(s);
  s.epsilon /= 2.0;
  CHECK(lower_bound(s) / at_eps ==
        doctest::Approx(std::pow(2.0, 2.0 + 1.0 / 1.0)).epsilon(1e-12));
  s.nu = 2.0;
  s.epsilon = 0.05;
  double a = lower_bound(s);
  s.epsilon = 0.025;
  CHECK(lower_bound(s) / a ==
        doctest::Approx(std::pow(2.0, 2.5)).epsilon(1e-12));
}

TEST_CASE("corrupted-samples floor scales as C^(nu/(nu+d))") {
  BoundSpec s;
  s.setting = BoundSetting::CorruptedSamples;
  s.family = KernelFamily::Matern;
  s.nu = 1.0;
  s.dim = 1;
  s.T = 1e6;
  s.C = 8.0;
  double at_c = lower_bound(s);
  CHECK(at_c == doctest::Approx(std::pow(8.0, 0.5) * std::pow(1e6, 0.5)));
  s.C = 64.0;
  CHECK(lower_bound(s) / at_c == doctest::Approx(std::pow(8.0, 0.5)));
  // SE flavor is linear in C with a polylog horizon factor.
  BoundSpec se = s;
  se.family = KernelFamily::SE;
  se.dim = 2;
  CHECK(lower_bound(se) ==
        doctest::Approx(64.0 * std::log(1e6)).epsilon(1e-12));
}

TEST_CASE("corruption budget guard demands C <= sqrt(T)") {
  BoundSpec s;
  s.setting = BoundSetting::CorruptedSamples;
  s.family = KernelFamily::Matern;
  s.nu = 1.0;
  s.dim = 1;
  s.T = 100.0;
  s.C = 11.0;  // above sqrt(T) = 10
  CHECK_THROWS_AS(lower_bound(s), ConfigError);
  s.allow_large_c = true;
  CHECK(lower_bound(s) > 0.0);
}

TEST_CASE("cumulative floors match the closed forms and enforce scaling") {
  BoundSpec s;
  s.setting = BoundSetting::StandardCumulative;
  s.family = KernelFamily::SE;
  s.dim = 2;
  s.T = 1e5;
  s.B = 1.0;
  s.noise_var = 0.25;
  s.delta = 0.1;
  double noise_term = 0.25 * std::log(10.0);
  double expect =
      std::sqrt(1e5 * 0.25 * std::log(1e5 / noise_term) * std::log(10.0));
  CHECK(lower_bound(s) == doctest::Approx(expect).epsilon(1e-12));
  // Matern flavor: exponents share the 1/(2 nu + d) structure.
  BoundSpec m = s;
  m.family = KernelFamily::Matern;
  m.nu = 1.0;
  m.dim = 1;
  double e = 1.0 / 3.0;
  expect = std::pow(1e5, 2.0 * e) * std::pow(noise_term, e);
  CHECK(lower_bound(m) == doctest::Approx(expect).epsilon(1e-12));
  // Doubling the horizon on the Matern floor multiplies by 2^((nu+d) e).
  m.T = 2e5;
  CHECK(lower_bound(m) / expect ==
        doctest::Approx(std::pow(2.0, 2.0 * e)).epsilon(1e-12));
  // A pathological noise scale trips the guard unless overridden.
  BoundSpec badnoise = s;
  badnoise.noise_var = 1e7;
  badnoise.T = 2.0;
  CHECK_THROWS_AS(lower_bound(badnoise), ConfigError);
}

TEST_CASE("robust-report floor mirrors the simple-regret complexity") {
  BoundSpec s = matern_simple();
  double plain = lower_bound(s);
  BoundSpec r = s;
  r.setting = BoundSetting::CorruptedFinalPoint;
  r.xi = 0.2;
  CHECK(lower_bound(r) == doctest::Approx(plain).epsilon(1e-12));
  // Robust setting admits the full delta range below 1.
  r.delta = 0.6;
  CHECK(lower_bound(r) > 0.0);
  r.xi = 0.7;
  CHECK_THROWS_AS(lower_bound(r), ConfigError);
}

TEST_CASE("player-side constant and regret guarantee") {
  CHECK(c1_constant(1.0) == doctest::Approx(8.0 / std::log(2.0)).epsilon(1e-12));
  double beta = beta_t(1.0, 0.25, 3.0, 0.1);
  CHECK(upper_bound_gpucb(400.0, 1.0, 0.25, 0.1, 3.0) ==
        doctest::Approx(std::sqrt(c1_constant(0.25) * 400.0 * beta * 3.0))
            .epsilon(1e-12));
}

TEST_CASE("delta guard rejects the uninformative range") {
  BoundSpec s = matern_simple();
  s.delta = 0.34;
  CHECK_THROWS_AS(lower_bound(s), ConfigError);
  s.delta = 1e-12;
  CHECK(lower_bound(s) > 0.0);
}
