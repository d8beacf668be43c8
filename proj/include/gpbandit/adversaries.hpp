#pragma once

#include <functional>
#include <vector>

#include "gpbandit/hard_instances.hpp"

namespace gpb {

// Budget adversary on samples. Mutated strictly sequentially within a single
// trajectory; distinct replicates own distinct states.
struct AdversaryState {
  double budget = 0;           // C
  double per_step_bound = 0;   // B0; per-step corruption range
  double spent = 0;
  bool active = true;
  std::vector<double> log;     // per-step |c_t|

  static AdversaryState with_budget(double C, double B0);
  double remaining() const { return budget - spent; }
};

// Push-to-zero strategy: subtract f_value from the observation while budget
// lasts; on the last affordable step push as close to zero as possible, then
// deactivate. Returns the corrupted observation.
double corrupt_sample(AdversaryState& state, double f_value, double y);

// Number of members j with sum_t |f_j(x_t)| < C over the sampled points.
int corruptible_count(const HardClass& cls, const Mat& sampled, double C);

// min of f over the l2-ball of radius xi around x intersected with [0,1]^d,
// evaluated on a lattice of grid_resolution points per axis spanning the
// ball's bounding cube (plus x itself, so the result never exceeds f(x)).
double worst_case_value(const std::function<double(const Vec&)>& f,
                        const Vec& x, double xi, int grid_resolution);
double worst_case_value(const FunctionInstance& f, const Vec& x, double xi,
                        int grid_resolution);

// [max over a shared domain grid of worst_case_value] - worst_case_value(x).
// The outer grid is an inclusive lattice with grid_resolution points per axis;
// nonnegative whenever x lies on that lattice, and used with odd resolutions
// so the domain center is a lattice point.
double xi_regret(const std::function<double(const Vec&)>& f, const Vec& x,
                 double xi, int grid_resolution);
double xi_regret(const FunctionInstance& f, const Vec& x, double xi,
                 int grid_resolution);

}  // namespace gpb
