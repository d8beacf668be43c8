#pragma once

#include <utility>

#include "gpbandit/common.hpp"

namespace gpb {

enum class KernelFamily { SE, Matern };

struct Kernel {
  KernelFamily family = KernelFamily::SE;
  double lengthscale = 0.2;
  double nu = 2.5;  // Matern smoothness; ignored for SE

  static Kernel se(double l);
  static Kernel matern(double nu, double l);
};

// k(x, x2); unit variance, exactly 1 at r = 0.
double eval_kernel(const Kernel& k, const Vec& x, const Vec& x2);

// Stationary profile as a function of the distance r >= 0.
double eval_kernel_r(const Kernel& k, double r);

// Gram matrix; unit diagonal.
Mat kernel_matrix(const Kernel& k, const Mat& X);

// Jitter ladder: start at 1e-10, double until the factorization succeeds,
// give up past 1e-6.
inline constexpr double kJitter0 = 1e-10;
inline constexpr double kJitterMax = 1e-6;

// Cholesky of A + jitter*I with the ladder above; returns the lower factor and
// the jitter actually used. Throws NumericalError when the ladder is exhausted.
std::pair<Mat, double> cholesky_with_jitter(const Mat& A);

// GP regression state over arbitrary sample points. Value-semantics: extended()
// returns a new state; existing states are never mutated, so states can be
// shared read-only across worker threads.
class PosteriorState {
 public:
  // No observations yet.
  static PosteriorState empty(const Kernel& k, double noise_var);

  PosteriorState extended(const Vec& x, double y) const;

  int size() const { return static_cast<int>(y_.size()); }
  double noise_var() const { return noise_var_; }
  const Mat& points() const { return X_; }
  const Vec& observations() const { return y_; }

  // Posterior mean and variance at q. With no data: (0, 1).
  std::pair<double, double> posterior(const Vec& q) const;

 private:
  friend std::pair<double, double> gp_posterior(const PosteriorState&,
                                                const Kernel&, const Vec&);
  void refactor();

  Kernel k_;
  double noise_var_ = 0.0;
  Mat X_;       // t x d
  Vec y_;
  Mat L_;       // lower Cholesky factor of K + (noise_var + jitter) I
  Vec w_;       // L^{-1} y
  double jitter_ = kJitter0;
  int steps_since_refactor_ = 0;
};

// Operation-style wrapper; q must match the state's dimension once nonempty.
std::pair<double, double> gp_posterior(const PosteriorState& state,
                                       const Kernel& k, const Vec& q);

// (1/2) log det(I + noise_var^{-1} K(X)) via Cholesky log-det.
double info_gain(const Kernel& k, double noise_var, const Mat& X);

// Greedy submodular maximization of info_gain over T grid points.
double max_info_gain_greedy(const Kernel& k, double noise_var, const Mat& grid,
                            int T);

}  // namespace gpb
