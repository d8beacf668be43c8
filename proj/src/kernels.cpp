#include "gpbandit/kernels.hpp"

#include <cmath>

namespace gpb {

Mat uniform_grid(int d, int per_axis) {
  require_config(d >= 1 && d <= 6, "grid dimension must be in [1, 6]");
  require_config(per_axis >= 2, "grid needs at least 2 points per axis");
  long n = 1;
  for (int i = 0; i < d; ++i) n *= per_axis;
  Mat g(n, d);
  for (long idx = 0; idx < n; ++idx) {
    long rem = idx;
    for (int ax = d - 1; ax >= 0; --ax) {
      long i = rem % per_axis;
      rem /= per_axis;
      g(idx, ax) = static_cast<double>(i) / (per_axis - 1);
    }
  }
  return g;
}

int nearest_grid_index(const Mat& grid, const Vec& x) {
  int best = 0;
  double best_d = (grid.row(0).transpose() - x).squaredNorm();
  for (int i = 1; i < grid.rows(); ++i) {
    double d2 = (grid.row(i).transpose() - x).squaredNorm();
    if (d2 < best_d) {
      best_d = d2;
      best = i;
    }
  }
  return best;
}

Kernel Kernel::se(double l) {
  require_config(l > 0 && std::isfinite(l), "SE lengthscale must be positive");
  return Kernel{KernelFamily::SE, l, 0.0};
}

Kernel Kernel::matern(double nu, double l) {
  require_config(l > 0 && std::isfinite(l), "Matern lengthscale must be positive");
  require_config(nu > 0 && std::isfinite(nu), "Matern smoothness must be positive");
  return Kernel{KernelFamily::Matern, l, nu};
}

double eval_kernel_r(const Kernel& k, double r) {
  require_config(std::isfinite(r) && r >= 0, "kernel distance must be finite and nonnegative");
  if (r == 0.0) return 1.0;
  const double l = k.lengthscale;
  if (k.family == KernelFamily::SE) {
    return std::exp(-r * r / (2.0 * l * l));
  }
  const double nu = k.nu;
  const double s = std::sqrt(2.0 * nu) * r / l;
  if (s < 1e-8) return 1.0;
  // Closed forms for the half-integer orders used throughout; generic Bessel
  // path otherwise.
  if (nu == 0.5) return std::exp(-s);
  if (nu == 1.5) return (1.0 + s) * std::exp(-s);
  if (nu == 2.5) return (1.0 + s + s * s / 3.0) * std::exp(-s);
  const double val = std::pow(2.0, 1.0 - nu) / std::tgamma(nu) *
                     std::pow(s, nu) * std::cyl_bessel_k(nu, s);
  // Guard against over/underflow at extreme arguments.
  if (!std::isfinite(val)) return s > 1.0 ? 0.0 : 1.0;
  return std::min(val, 1.0);
}

double eval_kernel(const Kernel& k, const Vec& x, const Vec& x2) {
  require_config(finite(x) && finite(x2), "kernel inputs must be finite");
  require_config(x.size() == x2.size(), "kernel inputs must share a dimension");
  return eval_kernel_r(k, (x - x2).norm());
}

Mat kernel_matrix(const Kernel& k, const Mat& X) {
  require_config(X.rows() > 0, "kernel_matrix needs a nonempty point set");
  const int n = static_cast<int>(X.rows());
  Mat K(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double v = eval_kernel_r(k, (X.row(i) - X.row(j)).norm());
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

std::pair<Mat, double> cholesky_with_jitter(const Mat& A) {
  if (!A.allFinite())
    throw NumericalError("Cholesky input contains non-finite entries");
  for (double jitter = kJitter0; jitter <= kJitterMax * (1 + 1e-12); jitter *= 2) {
    Mat B = A;
    B.diagonal().array() += jitter;
    Eigen::LLT<Mat> llt(B);
    if (llt.info() == Eigen::Success) return {Mat(llt.matrixL()), jitter};
  }
  throw NumericalError("Cholesky factorization failed at maximum jitter 1e-6");
}

PosteriorState PosteriorState::empty(const Kernel& k, double noise_var) {
  require_config(noise_var >= 0 && std::isfinite(noise_var),
                 "noise variance must be nonnegative");
  PosteriorState s;
  s.k_ = k;
  s.noise_var_ = noise_var;
  return s;
}

void PosteriorState::refactor() {
  Mat K = kernel_matrix(k_, X_);
  K.diagonal().array() += noise_var_;
  auto [L, jit] = cholesky_with_jitter(K);
  L_ = std::move(L);
  jitter_ = jit;
  w_ = L_.triangularView<Eigen::Lower>().solve(y_);
  steps_since_refactor_ = 0;
}

PosteriorState PosteriorState::extended(const Vec& x, double y) const {
  require_config(finite(x) && std::isfinite(y), "observation must be finite");
  PosteriorState s(*this);
  const int t = size();
  s.X_.conservativeResize(t + 1, x.size());
  s.X_.row(t) = x.transpose();
  s.y_.conservativeResize(t + 1);
  s.y_(t) = y;
  if (t == 0 || s.steps_since_refactor_ >= 63) {
    s.refactor();
    return s;
  }
  // Rank-1 extension of the cached factor.
  Vec kv(t);
  for (int i = 0; i < t; ++i)
    kv(i) = eval_kernel_r(k_, (X_.row(i).transpose() - x).norm());
  Vec a = L_.triangularView<Eigen::Lower>().solve(kv);
  double d2 = 1.0 + noise_var_ + jitter_ - a.squaredNorm();
  if (d2 <= jitter_ * 1e-3) {
    // Extension lost positive definiteness; rebuild from scratch.
    s.refactor();
    return s;
  }
  double dnew = std::sqrt(d2);
  Mat L(t + 1, t + 1);
  L.setZero();
  L.topLeftCorner(t, t) = L_;
  L.row(t).head(t) = a.transpose();
  L(t, t) = dnew;
  s.L_ = std::move(L);
  s.w_.conservativeResize(t + 1);
  s.w_(t) = (y - a.dot(w_)) / dnew;
  s.steps_since_refactor_ = steps_since_refactor_ + 1;
  return s;
}

std::pair<double, double> PosteriorState::posterior(const Vec& q) const {
  require_config(finite(q), "query point must be finite");
  const int t = size();
  if (t == 0) return {0.0, 1.0};
  require_config(q.size() == X_.cols(), "query dimension mismatch");
  Vec kv(t);
  for (int i = 0; i < t; ++i)
    kv(i) = eval_kernel_r(k_, (X_.row(i).transpose() - q).norm());
  Vec a = L_.triangularView<Eigen::Lower>().solve(kv);
  double mean = a.dot(w_);
  double var = 1.0 - a.squaredNorm();
  return {mean, std::max(var, 0.0)};
}

std::pair<double, double> gp_posterior(const PosteriorState& state,
                                       const Kernel& k, const Vec& q) {
  require_config(state.size() == 0 || k.family == state.k_.family,
                 "kernel family mismatch with posterior state");
  return state.posterior(q);
}

double info_gain(const Kernel& k, double noise_var, const Mat& X) {
  require_config(X.rows() > 0, "info_gain needs a nonempty point set");
  require_config(noise_var > 0, "info_gain needs positive noise variance");
  Mat A = kernel_matrix(k, X) / noise_var;
  A.diagonal().array() += 1.0;
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success) {
    auto [L, jit] = cholesky_with_jitter(A);
    (void)jit;
    double s = 0.0;
    for (int i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
    return s;
  }
  Mat L = llt.matrixL();
  double s = 0.0;
  for (int i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
  return s;
}

double max_info_gain_greedy(const Kernel& k, double noise_var, const Mat& grid,
                            int T) {
  const int n = static_cast<int>(grid.rows());
  require_config(T >= 1, "greedy horizon must be positive");
  require_config(T <= n, "greedy horizon exceeds grid size");
  require_config(noise_var > 0, "positive noise variance required");
  // Greedy selection maximizes the marginal gain (1/2)log(1 + var/noise_var);
  // conditional variances are maintained by incremental conditioning.
  Vec var = Vec::Ones(n);
  Mat Z(T, n);  // rows: L^{-1} K(S, grid)
  std::vector<int> chosen;
  double total = 0.0;
  for (int t = 0; t < T; ++t) {
    int best = -1;
    double best_var = -1.0;
    for (int i = 0; i < n; ++i) {
      bool used = false;
      for (int c : chosen)
        if (c == i) { used = true; break; }
      if (used) continue;
      if (var(i) > best_var + 1e-15) {
        best_var = var(i);
        best = i;
      }
    }
    total += 0.5 * std::log1p(std::max(best_var, 0.0) / noise_var);
    // Condition every grid point on the newly chosen one.
    const double denom = std::sqrt(std::max(best_var, 1e-12) + noise_var);
    Vec kv(n);
    for (int i = 0; i < n; ++i)
      kv(i) = eval_kernel_r(k, (grid.row(i) - grid.row(best)).norm());
    Vec z(n);
    for (int i = 0; i < n; ++i) {
      double cross = kv(i);
      for (int s = 0; s < t; ++s) cross -= Z(s, i) * Z(s, best);
      z(i) = cross / denom;
    }
    Z.row(t) = z.transpose();
    for (int i = 0; i < n; ++i) var(i) = std::max(var(i) - z(i) * z(i), 0.0);
    chosen.push_back(best);
  }
  return total;
}

}  // namespace gpb
