#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gpbandit/algorithms.hpp"
#include "gpbandit/bounds.hpp"
#include "gpbandit/hard_instances.hpp"

namespace gpb {

struct KernelSpec {
  KernelFamily family = KernelFamily::Matern;
  double lengthscale = 0.2;
  double nu = 2.5;
};

struct ClassSpec {
  ClassKind kind = ClassKind::SimplifiedMatern;
  double epsilon = 0.05;
  double B = 1.0;
  int dim = 1;
  double xi = 0.0;
  double eta = 0.01;
  double kappa = 1.0;
};

struct AlgorithmSpec {
  std::string name = "gp_ucb";  // gp_ucb | random
  double delta = 0.1;
  bool deterministic = true;
  ReportRule report = ReportRule::PosteriorMeanArgmax;
  // Noise variance assumed by the posterior; < 0 means "derive from the
  // environment noise, floored for conditioning".
  double model_noise_var = -1.0;
};

struct AdversarySpec {
  bool enabled = false;
  double budget = 0.0;
  double per_step_bound = 1.0;
};

struct SweepSpec {
  bool enabled = false;
  std::string parameter;  // epsilon | T | C
  std::vector<double> values;
  std::vector<int> horizons;  // optional per-value horizon override
  std::string metric;         // optional; default depends on the setting
  // When sweeping C, a positive value rebuilds the class per sweep point
  // with epsilon = epsilon_scale * sqrt(C / T), matching how the hard
  // instance is chosen against a given corruption budget.
  double epsilon_scale = 0.0;
};

struct GridSpec {
  int per_axis = 128;
  int vbar_per_axis = 32;
  int xi_eval_per_axis = 41;
  int cert_per_axis = 0;  // 0: builder default
};

struct BoundOverlaySpec {
  bool enabled = false;
  double knob = 1.0;
  bool normalize = true;  // scale the curve to match the first sweep point
  bool allow_large_c = false;
  bool assert_scaling_ok = false;
};

struct ExperimentConfig {
  int schema_version = 1;
  std::string name = "experiment";
  BoundSetting setting = BoundSetting::StandardSimple;
  KernelSpec kernel;
  ClassSpec cls;
  AlgorithmSpec algorithm;
  AdversarySpec adversary;
  double noise_var = 0.0;
  int horizon = 0;
  SweepSpec sweep;
  int replicates = 1;
  std::uint64_t seed = 1;
  GridSpec grid;
  double epsilon_target = -1.0;  // < 0: class epsilon
  bool stop_at_target = false;
  int pair_m = 0, pair_m_prime = 0;  // 1-based member pair; 0 = auto
  BoundOverlaySpec bound_overlay;
  std::string out;

  double target() const {
    return epsilon_target > 0 ? epsilon_target : cls.epsilon;
  }
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

Kernel kernel_from_spec(const KernelSpec& spec);
HardClass class_from_config(const ExperimentConfig& cfg);

struct ResultRow {
  std::string setting;
  std::string kind;
  int member = 0;
  int replicate = 0;
  int T = 0;
  double R_T = std::numeric_limits<double>::quiet_NaN();
  double simple_regret = std::numeric_limits<double>::quiet_NaN();
  double xi_regret = std::numeric_limits<double>::quiet_NaN();
  std::optional<int> time_to_eps;
  double spent = 0.0;
  bool success = false;
  std::string error;  // empty on success; not part of the CSV schema
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};
WilsonInterval wilson95(long long successes, long long n);

struct Aggregate {
  int n = 0;
  int errored = 0;
  double mean_RT = 0.0, median_RT = 0.0;
  double mean_simple = 0.0, median_simple = 0.0;
  double median_xi = std::numeric_limits<double>::quiet_NaN();
  // Censored cells (target never reached) enter at their own horizon.
  double median_time_to_eps = std::numeric_limits<double>::quiet_NaN();
  int censored = 0;
  double mean_spent = 0.0, max_spent = 0.0;
  long long successes = 0;
  double success_rate = 0.0, success_lo = 0.0, success_hi = 1.0;
};
Aggregate aggregate_rows(const std::vector<ResultRow>& rows);

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
  Aggregate agg;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers = 1);

// Re-run one (member ordinal, replicate) cell of the experiment and return
// its full trajectory. Deterministic: reproduces the exact run behind the
// corresponding CSV row.
Trajectory rerun_cell(const ExperimentConfig& cfg, int ordinal, int replicate);

struct SweepPoint {
  double value = 0.0;
  double metric = std::numeric_limits<double>::quiet_NaN();
  double metric_lo = std::numeric_limits<double>::quiet_NaN();
  double metric_hi = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
  ExperimentResult result;
};

struct SweepResult {
  ExperimentConfig config;
  std::string metric_name;
  std::vector<SweepPoint> points;
  bool slope_defined = false;
  double slope = 0.0;
  double intercept = 0.0;
  bool has_bound = false;
};

SweepResult scaling_sweep(const ExperimentConfig& cfg, int workers = 1);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

struct CheckResult {
  std::string name;
  bool pass = false;
  bool skipped = false;
  std::string measured;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
  std::string to_text() const;
};

VerifyReport verify_lemmas(const ExperimentConfig& cfg, int workers = 1);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

std::string rows_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_rows_csv(const std::string& text);
std::string summary_csv(const Aggregate& agg);
std::string plotdata_csv(const SweepResult& sweep);
std::string trajectory_csv(const Trajectory& tr);

// Standalone lower-bound evaluation request: a parameter set plus an optional
// curve over one parameter (epsilon | T | C | B | noise_var).
struct BoundQuery {
  BoundSpec spec;
  std::string parameter;        // empty: evaluate once at `spec` as given
  std::vector<double> values;
};

BoundQuery parse_bound_query(const std::string& json_text);

// "parameter,value,bound" rows (single evaluations use parameter "none" and
// value 0).
std::string bound_curve_csv(const BoundQuery& q);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Write the result/sweep artifacts into out_dir ("csv" or "plotdata");
// returns the paths written.
std::vector<std::string> emit_result(const ExperimentResult& result,
                                     const std::string& out_dir,
                                     const std::string& format);
std::vector<std::string> emit_sweep(const SweepResult& sweep,
                                    const std::string& out_dir,
                                    const std::string& format);

}  // namespace gpb
