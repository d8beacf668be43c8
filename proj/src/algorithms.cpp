#include "gpbandit/algorithms.hpp"

#include <algorithm>
#include <cmath>

namespace gpb {

double beta_t(double B, double noise_var, double gamma_prev, double delta) {
  require_config(B > 0 && noise_var > 0 && gamma_prev >= 0,
                 "beta_t parameters must be positive");
  require_config(delta > 0 && delta < 1, "delta must lie in (0, 1)");
  double root = std::sqrt(2.0 * (gamma_prev + 1.0 - std::log(delta)));
  double b = B + std::sqrt(noise_var) * root;
  return b * b;
}

GridPosterior::GridPosterior(const Kernel& k, const Mat& grid, double noise_var)
    : grid_(grid), Kgrid_(kernel_matrix(k, grid)), noise_var_(noise_var) {
  require_config(noise_var > 0,
                 "grid posterior needs positive model noise variance");
  const int n = static_cast<int>(grid.rows());
  pos_of_.assign(n, -1);
  var_ = Vec::Ones(n);
  mean_ = Vec::Zero(n);
}

void GridPosterior::refresh() {
  const int ns = static_cast<int>(support_.size());
  if (ns == 0) return;
  Mat A(ns, ns);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j) A(i, j) = Kgrid_(support_[i], support_[j]);
  for (int i = 0; i < ns; ++i) A(i, i) += noise_var_ / count_[i];
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success) {
    auto [L, jit] = cholesky_with_jitter(A);
    (void)jit;
    Mat Linv = Mat::Identity(ns, ns);
    L.triangularView<Eigen::Lower>().solveInPlace(Linv);
    Ainv_ = Linv.transpose() * Linv;
  } else {
    Ainv_ = llt.solve(Mat::Identity(ns, ns));
  }
  Mat Kgs(grid_.rows(), ns);
  for (int i = 0; i < ns; ++i) Kgs.col(i) = Kgrid_.col(support_[i]);
  Q_ = Kgs * Ainv_;
  var_ = Vec::Ones(grid_.rows()) - (Q_.array() * Kgs.array()).rowwise().sum().matrix();
  var_ = var_.cwiseMax(0.0);
  Vec ybar(ns);
  for (int i = 0; i < ns; ++i) ybar(i) = sum_[i] / count_[i];
  mean_ = Q_ * ybar;
  updates_since_refresh_ = 0;
}

void GridPosterior::add(int g, double y) {
  require_config(g >= 0 && g < grid_.rows(), "grid index out of range");
  require_config(std::isfinite(y), "observation must be finite");
  ++total_obs_;
  const int ns = static_cast<int>(support_.size());
  if (pos_of_[g] < 0) {
    // New support point: block-inverse append.
    Vec b(ns);
    for (int i = 0; i < ns; ++i) b(i) = Kgrid_(support_[i], g);
    double c = 1.0 + noise_var_;
    Vec w = ns > 0 ? Vec(Ainv_ * b) : Vec(0);
    double s = c - (ns > 0 ? b.dot(w) : 0.0);
    if (s <= 1e-12) {
      support_.push_back(g);
      pos_of_[g] = ns;
      count_.push_back(1);
      sum_.push_back(y);
      refresh();
      return;
    }
    Vec u = ns > 0 ? Vec(Q_ * b - Kgrid_.col(g)) : Vec(-Kgrid_.col(g));
    Mat Ainv_new(ns + 1, ns + 1);
    if (ns > 0) {
      Ainv_new.topLeftCorner(ns, ns) = Ainv_ + (w * w.transpose()) / s;
      Ainv_new.topRightCorner(ns, 1) = -w / s;
      Ainv_new.bottomLeftCorner(1, ns) = -w.transpose() / s;
    }
    Ainv_new(ns, ns) = 1.0 / s;
    Ainv_ = std::move(Ainv_new);
    Mat Qnew(grid_.rows(), ns + 1);
    if (ns > 0) Qnew.leftCols(ns) = Q_ + (u / s) * w.transpose();
    Qnew.col(ns) = -u / s;
    Q_ = std::move(Qnew);
    var_ -= u.cwiseProduct(u) / s;
    var_ = var_.cwiseMax(0.0);
    support_.push_back(g);
    pos_of_[g] = ns;
    count_.push_back(1);
    sum_.push_back(y);
  } else {
    // Repeat visit: the effective noise at that point shrinks; Sherman-
    // Morrison downdate of the diagonal.
    int p = pos_of_[g];
    long long n = count_[p];
    double delta = noise_var_ / static_cast<double>(n) -
                   noise_var_ / static_cast<double>(n + 1);
    double denom = 1.0 - delta * Ainv_(p, p);
    count_[p] = n + 1;
    sum_[p] += y;
    if (denom <= 1e-12) {
      refresh();
      return;
    }
    double beta = delta / denom;
    Vec w = Ainv_.col(p);
    Vec q = Q_.col(p);
    Ainv_ += beta * (w * w.transpose());
    Q_ += beta * (q * w.transpose());
    var_ -= beta * q.cwiseProduct(q);
    var_ = var_.cwiseMax(0.0);
  }
  if (++updates_since_refresh_ >= 1024) {
    refresh();
    return;
  }
  const int ns2 = static_cast<int>(support_.size());
  Vec ybar(ns2);
  for (int i = 0; i < ns2; ++i) ybar(i) = sum_[i] / count_[i];
  mean_ = Q_ * ybar;
}

namespace {

std::pair<double, double> observe(ObservationModel& o, const Vec& x, Rng& rng) {
  double fv = o.f(x);
  double y = fv;
  if (o.noise_sd > 0) y += o.noise_sd * rng.normal();
  double ytilde = y;
  if (o.adversary != nullptr) ytilde = corrupt_sample(*o.adversary, fv, y);
  return {y, ytilde};
}

void init_trajectory(Trajectory& tr, int T, int d, std::uint64_t seed,
                     const RunOptions& opts) {
  tr.T = T;
  tr.seed = seed;
  tr.X.resize(T, d);
  tr.chosen.resize(T);
  tr.y.resize(T);
  tr.ytilde.resize(T);
  tr.inst_regret.resize(T);
  tr.report_regret.resize(T);
  tr.spent_after.resize(T);
  if (opts.cls != nullptr) {
    tr.region.resize(T);
    tr.region_counts.assign(opts.cls->regions(), 0);
  }
}

void truncate_trajectory(Trajectory& tr, int steps) {
  tr.T = steps;
  tr.X.conservativeResize(steps, Eigen::NoChange);
  tr.chosen.resize(steps);
  tr.y.conservativeResize(steps);
  tr.ytilde.conservativeResize(steps);
  tr.inst_regret.conservativeResize(steps);
  tr.report_regret.conservativeResize(steps);
  tr.spent_after.conservativeResize(steps);
  if (!tr.region.empty()) tr.region.resize(steps);
}

void record_step(Trajectory& tr, int t, const Mat& grid, int idx,
                 const Vec& fvals, double f_star, double y, double ytilde,
                 const ObservationModel& o, const RunOptions& opts) {
  tr.X.row(t) = grid.row(idx);
  tr.chosen[t] = idx;
  tr.y(t) = y;
  tr.ytilde(t) = ytilde;
  tr.inst_regret(t) = f_star - fvals(idx);
  tr.spent_after(t) = o.adversary != nullptr ? o.adversary->spent : 0.0;
  if (opts.cls != nullptr) {
    int j = region_of(*opts.cls, grid.row(idx).transpose());
    tr.region[t] = j;
    tr.region_counts[j]++;
  }
}

}  // namespace

Trajectory gp_ucb_run(const Kernel& k, ObservationModel& oracle, int T,
                      const Mat& grid, std::uint64_t seed,
                      const RunOptions& opts) {
  require_config(grid.rows() > 0, "acquisition grid must be nonempty");
  require_config(T >= 0, "horizon must be nonnegative");
  const int n = static_cast<int>(grid.rows());
  const int d = static_cast<int>(grid.cols());
  Rng rng(seed);
  Vec fvals(n);
  for (int i = 0; i < n; ++i) fvals(i) = oracle.f(grid.row(i).transpose());
  double f_star = opts.f_star.value_or(fvals.maxCoeff());

  Trajectory tr;
  init_trajectory(tr, T, d, seed, opts);
  GridPosterior post(k, grid, opts.model_noise_var);
  double gamma_running = 0.0;
  int best_obs_idx = 0;
  double best_obs_val = -std::numeric_limits<double>::infinity();

  for (int t = 0; t < T; ++t) {
    double beta = beta_t(opts.B, opts.model_noise_var, gamma_running, opts.delta);
    double root_beta = std::sqrt(beta);
    const Vec& mean = post.mean();
    const Vec& var = post.var();
    int idx = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      double u = mean(i) + root_beta * std::sqrt(var(i));
      if (u > best) {
        best = u;
        idx = i;
      }
    }
    if (!opts.deterministic) {
      std::vector<int> ties;
      for (int i = 0; i < n; ++i) {
        double u = mean(i) + root_beta * std::sqrt(var(i));
        if (u >= best - 1e-12) ties.push_back(i);
      }
      if (ties.size() > 1)
        idx = ties[static_cast<int>(rng.uniform_index(ties.size()))];
    }
    gamma_running += 0.5 * std::log1p(var(idx) / opts.model_noise_var);
    auto [y, ytilde] = observe(oracle, grid.row(idx).transpose(), rng);
    post.add(idx, ytilde);
    if (ytilde > best_obs_val) {
      best_obs_val = ytilde;
      best_obs_idx = idx;
    }
    record_step(tr, t, grid, idx, fvals, f_star, y, ytilde, oracle, opts);
    int rep;
    if (opts.report == ReportRule::PosteriorMeanArgmax) {
      post.mean().maxCoeff(&rep);
    } else {
      rep = best_obs_idx;
    }
    tr.report_regret(t) = f_star - fvals(rep);
    tr.report_index = rep;
    if (opts.stop_below && tr.report_regret(t) <= *opts.stop_below) {
      truncate_trajectory(tr, t + 1);
      break;
    }
  }
  if (tr.T > 0) tr.report_point = grid.row(tr.report_index).transpose();
  return tr;
}

Trajectory random_run(ObservationModel& oracle, int T, const Mat& grid,
                      std::uint64_t seed, const RunOptions& opts) {
  require_config(grid.rows() > 0, "acquisition grid must be nonempty");
  const int n = static_cast<int>(grid.rows());
  const int d = static_cast<int>(grid.cols());
  Rng rng(seed);
  Vec fvals(n);
  for (int i = 0; i < n; ++i) fvals(i) = oracle.f(grid.row(i).transpose());
  double f_star = opts.f_star.value_or(fvals.maxCoeff());

  Trajectory tr;
  init_trajectory(tr, T, d, seed, opts);
  int best_obs_idx = 0;
  double best_obs_val = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < T; ++t) {
    int idx = static_cast<int>(rng.uniform_index(n));
    auto [y, ytilde] = observe(oracle, grid.row(idx).transpose(), rng);
    if (ytilde > best_obs_val) {
      best_obs_val = ytilde;
      best_obs_idx = idx;
    }
    record_step(tr, t, grid, idx, fvals, f_star, y, ytilde, oracle, opts);
    tr.report_regret(t) = f_star - fvals(best_obs_idx);
    tr.report_index = best_obs_idx;
    if (opts.stop_below && tr.report_regret(t) <= *opts.stop_below) {
      truncate_trajectory(tr, t + 1);
      break;
    }
  }
  if (tr.T > 0) tr.report_point = grid.row(tr.report_index).transpose();
  return tr;
}

std::optional<int> time_to_epsilon(const Trajectory& traj, double eps) {
  for (int t = 0; t < traj.T; ++t)
    if (traj.report_regret(t) <= eps) return t + 1;
  return std::nullopt;
}

}  // namespace gpb
