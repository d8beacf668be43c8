#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gpbandit/adversaries.hpp"

namespace gpb {

// (B + sigma*sqrt(2*(gamma_prev + log(e/delta))))^2
double beta_t(double B, double noise_var, double gamma_prev, double delta);

// Observation source wrapping (instance, environment noise, optional
// adversary). The adversary, when present, sees the true function value.
struct ObservationModel {
  std::function<double(const Vec&)> f;
  double noise_sd = 0;
  AdversaryState* adversary = nullptr;
};

enum class ReportRule { PosteriorMeanArgmax, BestObserved };

struct RunOptions {
  double B = 1.0;
  double model_noise_var = 1e-6;  // noise variance the player assumes
  double delta = 0.1;
  // With deterministic=true, acquisition ties break toward the lowest grid
  // index; otherwise a tie is resolved with a random draw.
  bool deterministic = true;
  ReportRule report = ReportRule::PosteriorMeanArgmax;
  const HardClass* cls = nullptr;  // optional region bookkeeping
  // Regret reference value; defaults to the best function value on the grid.
  std::optional<double> f_star;
  // Stop early once the reported point's regret drops to this level.
  std::optional<double> stop_below;
};

struct Trajectory {
  Mat X;                     // T x d sampled points
  std::vector<int> chosen;   // grid indices, one per step
  Vec y;                     // raw observations
  Vec ytilde;                // corrupted observations (== y without adversary)
  Vec inst_regret;           // f*(grid) - f(x_t)
  Vec report_regret;         // f*(grid) - f(report point) after each step
  Vec spent_after;           // adversary budget spent after each step
  std::vector<int> region;           // region index per step (if class given)
  std::vector<long long> region_counts;  // N_j (if class given)
  Vec report_point;          // x^(T)
  int report_index = -1;     // grid index of x^(T)
  std::uint64_t seed = 0;
  int T = 0;

  double cumulative_regret() const { return inst_regret.sum(); }
  double simple_regret() const {
    return T > 0 ? report_regret(T - 1) : 0.0;
  }
};

// UCB rule x_t = argmax over grid of mean + sqrt(beta_t) * std; posterior
// updates use a support-collapsed grid representation equivalent to the full
// GP posterior. Tie-break: lowest grid index. beta_t consumes the running
// chain-rule information-gain estimate.
Trajectory gp_ucb_run(const Kernel& k, ObservationModel& oracle, int T,
                      const Mat& grid, std::uint64_t seed,
                      const RunOptions& opts);

// Uniform independent grid choices; reporting by best observed value.
Trajectory random_run(ObservationModel& oracle, int T, const Mat& grid,
                      std::uint64_t seed, const RunOptions& opts);

// Smallest t whose reported point is eps-optimal (scanning the recorded
// per-step reporting rule); nullopt if never within the horizon.
std::optional<int> time_to_epsilon(const Trajectory& traj, double eps);

// Exact GP posterior over a fixed grid, maintained incrementally under
// repeated observations of grid points. Equivalent to the naive
// (K_t + sigma^2 I)^{-1} formulation with t observations; memory stays
// O(N^2) because repeated visits collapse into per-point counts and means.
class GridPosterior {
 public:
  GridPosterior(const Kernel& k, const Mat& grid, double noise_var);

  void add(int grid_index, double y);
  int observations() const { return total_obs_; }

  const Vec& mean() const { return mean_; }
  const Vec& var() const { return var_; }

 private:
  void refresh();

  Mat grid_;
  Mat Kgrid_;
  double noise_var_;
  std::vector<int> support_;       // grid indices in insertion order
  std::vector<int> pos_of_;        // grid index -> support position or -1
  std::vector<long long> count_;   // per support position
  std::vector<double> sum_;        // per support position
  Mat Ainv_;                       // (K_S + noise diag)^{-1}
  Mat Q_;                          // K_{grid,S} Ainv
  Vec var_;
  Vec mean_;
  int total_obs_ = 0;
  int updates_since_refresh_ = 0;
};

}  // namespace gpb
