#pragma once

#include <functional>
#include <vector>

#include "gpbandit/kernels.hpp"

namespace gpb {

enum class Shape {
  SpatialBump,    // compactly supported smooth bump, support radius = width
  SEBump,         // Gaussian profile, infinite support
  SincBump,       // product of squared sincs, frequency parameter freq
  BallPlateau,    // radial plateau/taper/zero profile, tabulated
  ConstantShift,  // constant = height everywhere
  Composite       // signed sum of components
};

struct FunctionInstance {
  Shape shape = Shape::ConstantShift;
  Vec center;          // offset of the profile; empty means origin
  double height = 0;   // peak magnitude of the unsigned profile
  double width = 0;    // support radius (SpatialBump), Gaussian width (SEBump)
  double sign = 1.0;   // applied to the evaluation
  double freq = 0;     // SincBump frequency a

  // BallPlateau: plateau for radius <= r - w0, zero for radius >= r + w0,
  // tabulated monotone taper between.
  double r = 0;
  double w0 = 0;
  std::vector<double> taper_table;  // radial profile on [0, r + w0]

  std::vector<FunctionInstance> components;  // Composite only

  double norm_certificate = 0;

  double operator()(const Vec& x) const;
  int dim() const { return static_cast<int>(center.size()); }
};

// d-dimensional standard bump: exp(-1/(1-|z|^2)) inside the unit ball, 0 outside.
double bump(const Vec& z);
double bump_radial(double t);

// Compactly supported Matern-RKHS candidate with peak 2*eps at center and
// support radius w = (2*eps*kappa/B)^(1/nu). kappa comes from numeric
// calibration (see calibrate_matern_kappa) and is stored in configs.
FunctionInstance make_matern_bump(double eps, double B, const Kernel& k,
                                  const Vec& center, double kappa);

// Gaussian profile with peak 2*eps; finite SE-RKHS norm requires w >= l.
FunctionInstance make_se_bump(double eps, const Vec& center, double w, double l);

// Squared-sinc profile with peak 2*eps; compactly supported spectrum, so the
// SE-RKHS norm is finite for every frequency. Level-1/2 half width along an
// axis is kSincHalfLevel / freq.
FunctionInstance make_sinc_bump(double eps, const Vec& center, double freq);

// sin(z)^2/z^2 = 1/2 at this argument.
inline constexpr double kSincHalfLevel = 1.39155737825151;

// Radial plateau of height 1 centered at the origin: 1 for radius <= r - w0,
// 0 for radius >= r + w0, monotone taper between (profile of the 1-d
// convolution of the standard bump with a ball indicator, tabulated with
// grid_resolution cells over [0, r + w0] and evaluated by linear
// interpolation). Scale via the height field.
FunctionInstance ball_plateau(double r, double w0, int grid_resolution);

// sqrt(v^T (K + jitter)^{-1} v), v = f on the grid: a lower bound on the RKHS
// norm, monotone non-decreasing under grid refinement.
double min_norm_certificate(const Kernel& k, const FunctionInstance& f,
                            const Mat& grid);
double min_norm_certificate(const Kernel& k,
                            const std::function<double(const Vec&)>& f,
                            const Mat& grid);

// Largest sinc frequency whose bump (peak 2*eps) certifies at most
// norm_target on cert_grid. Certificates increase with frequency, so this is
// a bisection.
double calibrate_sinc_freq(const Kernel& k, double eps, double norm_target,
                           const Vec& center, const Mat& cert_grid);

// kappa such that the width formula w = (2*eps*kappa/B)^(1/nu) yields the
// narrowest spatial bump (peak 2*eps) certifying at most norm_target on
// cert_grid.
double calibrate_matern_kappa(const Kernel& k, double eps, double B,
                              double norm_target, const Vec& center,
                              const Mat& cert_grid);

}  // namespace gpb
