#include "gpbandit/rkhs.hpp"

#include <cmath>

namespace gpb {

namespace {

double sinc(double z) {
  if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

// Normalized CDF of the 1-d standard bump on [-1, 1] via Simpson quadrature.
double bump_cdf(double u) {
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return 1.0;
  static const int N = 4096;  // even
  static std::vector<double> table = [] {
    std::vector<double> cum(N + 1, 0.0);
    const double hstep = 2.0 / N;
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
      double a = -1.0 + i * hstep;
      double m = a + hstep / 2;
      double b = a + hstep;
      acc += hstep / 6.0 *
             (bump_radial(std::abs(a)) + 4.0 * bump_radial(std::abs(m)) +
              bump_radial(std::abs(b)));
      cum[i + 1] = acc;
    }
    for (double& v : cum) v /= acc;
    return cum;
  }();
  double pos = (u + 1.0) / 2.0 * N;
  int i = std::min(static_cast<int>(pos), N - 1);
  double frac = pos - i;
  return table[i] * (1 - frac) + table[i + 1] * frac;
}

}  // namespace

double bump_radial(double t) {
  if (t >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

double bump(const Vec& z) {
  double n2 = z.squaredNorm();
  if (n2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - n2));
}

double FunctionInstance::operator()(const Vec& x) const {
  switch (shape) {
    case Shape::ConstantShift:
      return sign * height;
    case Shape::SpatialBump: {
      double t = (x - center).norm() / width;
      return sign * height * bump_radial(t) / bump_radial(0.0);
    }
    case Shape::SEBump: {
      double r2 = (x - center).squaredNorm();
      return sign * height * std::exp(-r2 / (2.0 * width * width));
    }
    case Shape::SincBump: {
      double v = height;
      for (int i = 0; i < x.size(); ++i) {
        double s = sinc(freq * (x(i) - center(i)));
        v *= s * s;
      }
      return sign * v;
    }
    case Shape::BallPlateau: {
      double t = (x - center).norm();
      if (t <= r - w0) return sign * height;
      if (t >= r + w0) return 0.0;
      double pos = t / (r + w0) * (taper_table.size() - 1);
      int i = std::min(static_cast<int>(pos),
                       static_cast<int>(taper_table.size()) - 2);
      double frac = pos - i;
      return sign * height *
             (taper_table[i] * (1 - frac) + taper_table[i + 1] * frac);
    }
    case Shape::Composite: {
      double v = 0.0;
      for (const auto& c : components) v += c(x);
      return sign * v;
    }
  }
  return 0.0;
}

FunctionInstance make_matern_bump(double eps, double B, const Kernel& k,
                                  const Vec& center, double kappa) {
  require_config(eps > 0 && B > 0 && kappa > 0,
                 "bump parameters must be positive");
  require_config(k.family == KernelFamily::Matern,
                 "spatial bump width formula requires a Matern kernel");
  double w = std::pow(2.0 * eps * kappa / B, 1.0 / k.nu);
  require_config(w < 0.5,
                 "instance too wide: w >= 1/2, the class would be empty");
  FunctionInstance f;
  f.shape = Shape::SpatialBump;
  f.center = center;
  f.height = 2.0 * eps;
  f.width = w;
  return f;
}

FunctionInstance make_se_bump(double eps, const Vec& center, double w,
                              double l) {
  require_config(eps > 0 && w > 0 && l > 0, "bump parameters must be positive");
  require_config(w >= l, "w < l rejected: SE-RKHS norm would blow up");
  FunctionInstance f;
  f.shape = Shape::SEBump;
  f.center = center;
  f.height = 2.0 * eps;
  f.width = w;
  return f;
}

FunctionInstance make_sinc_bump(double eps, const Vec& center, double freq) {
  require_config(eps > 0 && freq > 0, "bump parameters must be positive");
  FunctionInstance f;
  f.shape = Shape::SincBump;
  f.center = center;
  f.height = 2.0 * eps;
  f.freq = freq;
  return f;
}

FunctionInstance ball_plateau(double r, double w0, int grid_resolution) {
  require_config(r > 0 && w0 > 0 && w0 <= r / 2.0,
                 "ball plateau requires 0 < w0 <= r/2");
  double cells_across_taper = 2.0 * w0 / (r + w0) * grid_resolution;
  require_config(cells_across_taper >= 8.0,
                 "resolution too coarse to resolve the taper width");
  FunctionInstance f;
  f.shape = Shape::BallPlateau;
  f.center = Vec::Zero(1);  // callers reset center and dimension
  f.height = 1.0;
  f.r = r;
  f.w0 = w0;
  f.taper_table.resize(grid_resolution + 1);
  for (int i = 0; i <= grid_resolution; ++i) {
    double t = static_cast<double>(i) / grid_resolution * (r + w0);
    f.taper_table[i] = 1.0 - bump_cdf((t - r) / w0);
  }
  return f;
}

double min_norm_certificate(const Kernel& k,
                            const std::function<double(const Vec&)>& f,
                            const Mat& grid) {
  require_config(grid.rows() > 0, "certificate needs a nonempty grid");
  const int n = static_cast<int>(grid.rows());
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = f(grid.row(i).transpose());
  if (v.isZero(0.0)) return 0.0;
  Mat K = kernel_matrix(k, grid);
  auto [L, jit] = cholesky_with_jitter(K);
  (void)jit;
  Vec a = L.triangularView<Eigen::Lower>().solve(v);
  return a.norm();
}

double min_norm_certificate(const Kernel& k, const FunctionInstance& f,
                            const Mat& grid) {
  return min_norm_certificate(
      k, [&f](const Vec& x) { return f(x); }, grid);
}

namespace {

// Shared bisection driver: cert(param) is monotone increasing; find the
// largest param with cert <= target.
template <typename CertFn>
double bisect_increasing(CertFn cert, double lo, double target) {
  require_config(cert(lo) <= target,
                 "norm target unreachable even at the widest admissible shape");
  double hi = lo;
  for (int i = 0; i < 60 && cert(hi) <= target; ++i) hi *= 2.0;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    if (cert(mid) <= target)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

double calibrate_sinc_freq(const Kernel& k, double eps, double norm_target,
                           const Vec& center, const Mat& cert_grid) {
  require_config(k.family == KernelFamily::SE,
                 "sinc calibration targets the SE kernel");
  // Factor the grid kernel once; the bisection only changes the value vector.
  Mat K = kernel_matrix(k, cert_grid);
  auto [L, jit] = cholesky_with_jitter(K);
  (void)jit;
  const int n = static_cast<int>(cert_grid.rows());
  auto cert = [&](double a) {
    FunctionInstance f = make_sinc_bump(eps, center, a);
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = f(cert_grid.row(i).transpose());
    return L.triangularView<Eigen::Lower>().solve(v).norm();
  };
  return bisect_increasing(cert, M_PI, norm_target);
}

double calibrate_matern_kappa(const Kernel& k, double eps, double B,
                              double norm_target, const Vec& center,
                              const Mat& cert_grid) {
  require_config(k.family == KernelFamily::Matern,
                 "kappa calibration targets the Matern kernel");
  Mat K = kernel_matrix(k, cert_grid);
  auto [L, jit] = cholesky_with_jitter(K);
  (void)jit;
  const int n = static_cast<int>(cert_grid.rows());
  auto cert_at_inv_width = [&](double inv_w) {
    FunctionInstance f;
    f.shape = Shape::SpatialBump;
    f.center = center;
    f.height = 2.0 * eps;
    f.width = 1.0 / inv_w;
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = f(cert_grid.row(i).transpose());
    return L.triangularView<Eigen::Lower>().solve(v).norm();
  };
  // Narrower bump -> larger norm, so bisect on 1/w.
  double inv_w = bisect_increasing(cert_at_inv_width, 1.0 / 0.49, norm_target);
  double w = 1.0 / inv_w;
  return B * std::pow(w, k.nu) / (2.0 * eps);
}

}  // namespace gpb
