#include "gpbandit/adversaries.hpp"

#include <cmath>

namespace gpb {

AdversaryState AdversaryState::with_budget(double C, double B0) {
  require_config(C >= 0 && std::isfinite(C), "budget must be nonnegative");
  require_config(B0 > 0, "per-step corruption bound must be positive");
  AdversaryState s;
  s.budget = C;
  s.per_step_bound = B0;
  s.active = C > 0;
  return s;
}

double corrupt_sample(AdversaryState& state, double f_value, double y) {
  require_config(std::isfinite(f_value) && std::isfinite(y),
                 "observation must be finite");
  require_config(std::abs(f_value) <= state.per_step_bound,
                 "function value exceeds the per-step corruption range B0");
  if (!state.active) {
    state.log.push_back(0.0);
    return y;
  }
  double want = std::abs(f_value);
  double rem = state.remaining();
  if (want <= rem) {
    state.log.push_back(want);
    state.spent += want;
    if (state.spent >= state.budget) {
      state.spent = state.budget;
      state.active = false;
    }
    return y - f_value;
  }
  // Partial push: as close to zero as the remaining budget allows.
  double charge = rem;
  state.log.push_back(charge);
  state.spent = state.budget;
  state.active = false;
  double sign = f_value >= 0 ? 1.0 : -1.0;
  return y - sign * charge;
}

int corruptible_count(const HardClass& cls, const Mat& sampled, double C) {
  const int Mh = cls.M();
  int count = 0;
  for (int m = 0; m < Mh; ++m) {
    const FunctionInstance& f = cls.members[cls.member_index(m)];
    double total = 0.0;
    for (int t = 0; t < sampled.rows(); ++t)
      total += std::abs(f(sampled.row(t).transpose()));
    if (total < C) ++count;
  }
  return count;
}

namespace {

double ball_min(const std::function<double(const Vec&)>& f, const Vec& x,
                double xi, int res) {
  require_config(res >= 2, "perturbation sub-grid needs at least 2 points per axis");
  const int d = static_cast<int>(x.size());
  double best = f(x);  // the zero perturbation always participates
  if (xi <= 0) return best;
  std::vector<int> idx(d, 0);
  Vec p(d);
  while (true) {
    bool in_domain = true;
    for (int ax = 0; ax < d; ++ax) {
      p(ax) = x(ax) - xi + 2.0 * xi * idx[ax] / (res - 1);
      if (p(ax) < 0.0 || p(ax) > 1.0) in_domain = false;
    }
    if (in_domain && (p - x).norm() <= xi * (1.0 + 1e-12))
      best = std::min(best, f(p));
    int ax = d - 1;
    while (ax >= 0) {
      if (++idx[ax] < res) break;
      idx[ax] = 0;
      --ax;
    }
    if (ax < 0) break;
  }
  return best;
}

}  // namespace

double worst_case_value(const std::function<double(const Vec&)>& f,
                        const Vec& x, double xi, int grid_resolution) {
  require_config(finite(x), "query point must be finite");
  for (int ax = 0; ax < x.size(); ++ax)
    require_config(x(ax) >= 0.0 && x(ax) <= 1.0,
                   "query point outside the domain [0,1]^d");
  require_config(xi >= 0, "perturbation radius must be nonnegative");
  return ball_min(f, x, xi, grid_resolution);
}

double worst_case_value(const FunctionInstance& f, const Vec& x, double xi,
                        int grid_resolution) {
  return worst_case_value([&f](const Vec& p) { return f(p); }, x, xi,
                          grid_resolution);
}

double xi_regret(const std::function<double(const Vec&)>& f, const Vec& x,
                 double xi, int grid_resolution) {
  const int d = static_cast<int>(x.size());
  double at_x = worst_case_value(f, x, xi, grid_resolution);
  Mat outer = uniform_grid(d, grid_resolution);
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < outer.rows(); ++i)
    best = std::max(best,
                    ball_min(f, outer.row(i).transpose(), xi, grid_resolution));
  return best - at_x;
}

double xi_regret(const FunctionInstance& f, const Vec& x, double xi,
                 int grid_resolution) {
  return xi_regret([&f](const Vec& p) { return f(p); }, x, xi, grid_resolution);
}

}  // namespace gpb
