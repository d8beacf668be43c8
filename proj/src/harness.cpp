#include "gpbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace gpb {

using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Strict JSON access: unknown keys and wrong types are config errors that
// name the offending field.

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

const json& field(const json& j, const std::string& where,
                  const std::string& key) {
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError("missing required field '" + key + "' in " + where);
  return *it;
}

double num_field(const json& j, const std::string& where,
                 const std::string& key) {
  const json& v = field(j, where, key);
  if (!v.is_number())
    throw ConfigError("field '" + key + "' in " + where + " must be a number");
  return v.get<double>();
}

double num_or(const json& j, const std::string& where, const std::string& key,
              double dflt) {
  if (!j.contains(key)) return dflt;
  return num_field(j, where, key);
}

int int_field(const json& j, const std::string& where, const std::string& key) {
  const json& v = field(j, where, key);
  if (!v.is_number_integer())
    throw ConfigError("field '" + key + "' in " + where +
                      " must be an integer");
  return v.get<int>();
}

int int_or(const json& j, const std::string& where, const std::string& key,
           int dflt) {
  if (!j.contains(key)) return dflt;
  return int_field(j, where, key);
}

bool bool_or(const json& j, const std::string& where, const std::string& key,
             bool dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_boolean())
    throw ConfigError("field '" + key + "' in " + where + " must be a boolean");
  return v.get<bool>();
}

std::string str_field(const json& j, const std::string& where,
                      const std::string& key) {
  const json& v = field(j, where, key);
  if (!v.is_string())
    throw ConfigError("field '" + key + "' in " + where + " must be a string");
  return v.get<std::string>();
}

std::string str_or(const json& j, const std::string& where,
                   const std::string& key, const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  return str_field(j, where, key);
}

KernelFamily family_from_string(const std::string& s) {
  if (s == "se") return KernelFamily::SE;
  if (s == "matern") return KernelFamily::Matern;
  throw ConfigError("unknown kernel family: " + s + " (expected se|matern)");
}

ReportRule report_from_string(const std::string& s) {
  if (s == "posterior_mean_argmax") return ReportRule::PosteriorMeanArgmax;
  if (s == "best_observed") return ReportRule::BestObserved;
  throw ConfigError("unknown report rule: " + s);
}

void cross_validate(const ExperimentConfig& cfg) {
  const bool robust_kind = cfg.cls.kind == ClassKind::FinalPointRobust;
  if (cfg.setting == BoundSetting::CorruptedSamples) {
    require_config(cfg.adversary.enabled,
                   "setting corrupted_samples needs an adversary block");
  } else {
    require_config(!cfg.adversary.enabled,
                   "adversary block is only valid with corrupted_samples");
  }
  if (cfg.setting == BoundSetting::CorruptedFinalPoint) {
    require_config(robust_kind,
                   "setting corrupted_final_point needs class kind "
                   "final_point_robust");
    require_config(cfg.cls.xi > 0, "class.xi must be positive");
  } else {
    require_config(!robust_kind,
                   "class kind final_point_robust needs setting "
                   "corrupted_final_point");
  }
  if (cfg.cls.kind == ClassKind::StandardSE)
    require_config(cfg.kernel.family == KernelFamily::SE,
                   "class kind standard_se needs kernel family se");
  if (cfg.cls.kind == ClassKind::StandardMatern ||
      cfg.cls.kind == ClassKind::SimplifiedMatern || robust_kind)
    require_config(cfg.kernel.family == KernelFamily::Matern,
                   "this class kind needs kernel family matern");
  require_config(cfg.algorithm.name == "gp_ucb" ||
                     cfg.algorithm.name == "random",
                 "unknown algorithm: " + cfg.algorithm.name);
  if (cfg.sweep.enabled) {
    const auto& sw = cfg.sweep;
    require_config(sw.parameter == "epsilon" || sw.parameter == "T" ||
                       sw.parameter == "C",
                   "sweep.parameter must be epsilon, T, or C");
    require_config(sw.values.size() >= 1, "sweep.values must be nonempty");
    for (double v : sw.values)
      require_config(v > 0, "sweep.values must be positive");
    require_config(sw.horizons.empty() ||
                       sw.horizons.size() == sw.values.size(),
                   "sweep.horizons must match sweep.values in length");
    if (sw.parameter == "C")
      require_config(cfg.adversary.enabled,
                     "sweeping C needs an adversary block");
    if (sw.epsilon_scale > 0)
      require_config(sw.parameter == "C",
                     "sweep.epsilon_scale only applies to C sweeps");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  check_keys(j, "config",
             {"schema_version", "name", "setting", "kernel", "class",
              "algorithm", "adversary", "noise_var", "horizon", "sweep",
              "replicates", "seed", "grid", "epsilon_target", "stop_at_target",
              "pair", "bound_overlay", "out"});
  ExperimentConfig cfg;
  cfg.schema_version = int_field(j, "config", "schema_version");
  require_config(cfg.schema_version == 1,
                 "unsupported schema_version (expected 1)");
  cfg.name = str_or(j, "config", "name", "experiment");
  cfg.setting = bound_setting_from_string(str_field(j, "config", "setting"));

  const json& jk = field(j, "config", "kernel");
  check_keys(jk, "kernel", {"family", "lengthscale", "nu"});
  cfg.kernel.family = family_from_string(str_field(jk, "kernel", "family"));
  cfg.kernel.lengthscale = num_field(jk, "kernel", "lengthscale");
  require_config(cfg.kernel.lengthscale > 0,
                 "kernel.lengthscale must be positive");
  cfg.kernel.nu = num_or(jk, "kernel", "nu", 2.5);
  require_config(cfg.kernel.nu > 0, "kernel.nu must be positive");

  const json& jc = field(j, "config", "class");
  check_keys(jc, "class", {"kind", "epsilon", "B", "dim", "xi", "eta", "kappa"});
  cfg.cls.kind = class_kind_from_string(str_field(jc, "class", "kind"));
  cfg.cls.epsilon = num_field(jc, "class", "epsilon");
  require_config(cfg.cls.epsilon > 0, "class.epsilon must be positive");
  cfg.cls.B = num_or(jc, "class", "B", 1.0);
  require_config(cfg.cls.B > 0, "class.B must be positive");
  cfg.cls.dim = int_or(jc, "class", "dim", 1);
  require_config(cfg.cls.dim >= 1 && cfg.cls.dim <= 3,
                 "class.dim must be 1, 2, or 3");
  cfg.cls.xi = num_or(jc, "class", "xi", 0.0);
  cfg.cls.eta = num_or(jc, "class", "eta", 0.01);
  cfg.cls.kappa = num_or(jc, "class", "kappa", 1.0);
  require_config(cfg.cls.kappa > 0, "class.kappa must be positive");

  if (j.contains("algorithm")) {
    const json& ja = j.at("algorithm");
    check_keys(ja, "algorithm",
               {"name", "delta", "deterministic", "report", "model_noise_var"});
    cfg.algorithm.name = str_or(ja, "algorithm", "name", "gp_ucb");
    cfg.algorithm.delta = num_or(ja, "algorithm", "delta", 0.1);
    require_config(cfg.algorithm.delta > 0 && cfg.algorithm.delta < 1,
                   "algorithm.delta must lie in (0, 1)");
    cfg.algorithm.deterministic =
        bool_or(ja, "algorithm", "deterministic", true);
    cfg.algorithm.report = report_from_string(
        str_or(ja, "algorithm", "report", "posterior_mean_argmax"));
    cfg.algorithm.model_noise_var =
        num_or(ja, "algorithm", "model_noise_var", -1.0);
  }

  if (j.contains("adversary")) {
    const json& jv = j.at("adversary");
    check_keys(jv, "adversary", {"budget", "per_step_bound"});
    cfg.adversary.enabled = true;
    cfg.adversary.budget = num_field(jv, "adversary", "budget");
    require_config(cfg.adversary.budget > 0,
                   "adversary.budget must be positive");
    cfg.adversary.per_step_bound =
        num_or(jv, "adversary", "per_step_bound", 1.0);
    require_config(cfg.adversary.per_step_bound > 0,
                   "adversary.per_step_bound must be positive");
  }

  cfg.noise_var = num_field(j, "config", "noise_var");
  require_config(cfg.noise_var >= 0, "noise_var must be nonnegative");
  cfg.horizon = int_field(j, "config", "horizon");
  require_config(cfg.horizon >= 0, "horizon must be nonnegative");

  if (j.contains("sweep")) {
    const json& js = j.at("sweep");
    check_keys(js, "sweep",
               {"parameter", "values", "horizons", "metric", "epsilon_scale"});
    cfg.sweep.enabled = true;
    cfg.sweep.parameter = str_field(js, "sweep", "parameter");
    const json& vals = field(js, "sweep", "values");
    if (!vals.is_array())
      throw ConfigError("sweep.values must be an array of numbers");
    for (const auto& v : vals) {
      if (!v.is_number())
        throw ConfigError("sweep.values must be an array of numbers");
      cfg.sweep.values.push_back(v.get<double>());
    }
    if (js.contains("horizons")) {
      const json& hs = js.at("horizons");
      if (!hs.is_array())
        throw ConfigError("sweep.horizons must be an array of integers");
      for (const auto& h : hs) {
        if (!h.is_number_integer())
          throw ConfigError("sweep.horizons must be an array of integers");
        cfg.sweep.horizons.push_back(h.get<int>());
      }
    }
    cfg.sweep.metric = str_or(js, "sweep", "metric", "");
    cfg.sweep.epsilon_scale = num_or(js, "sweep", "epsilon_scale", 0.0);
  }

  cfg.replicates = int_field(j, "config", "replicates");
  require_config(cfg.replicates >= 1, "replicates must be at least 1");
  {
    const json& v = field(j, "config", "seed");
    if (!v.is_number_unsigned() && !v.is_number_integer())
      throw ConfigError("field 'seed' in config must be a nonnegative integer");
    cfg.seed = v.get<std::uint64_t>();
  }

  if (j.contains("grid")) {
    const json& jg = j.at("grid");
    check_keys(jg, "grid",
               {"per_axis", "vbar_per_axis", "xi_eval_per_axis",
                "cert_per_axis"});
    cfg.grid.per_axis = int_or(jg, "grid", "per_axis", 128);
    cfg.grid.vbar_per_axis = int_or(jg, "grid", "vbar_per_axis", 32);
    cfg.grid.xi_eval_per_axis = int_or(jg, "grid", "xi_eval_per_axis", 41);
    cfg.grid.cert_per_axis = int_or(jg, "grid", "cert_per_axis", 0);
    require_config(cfg.grid.per_axis >= 2, "grid.per_axis must be at least 2");
    require_config(cfg.grid.vbar_per_axis >= 16,
                   "grid.vbar_per_axis must be at least 16");
    require_config(cfg.grid.xi_eval_per_axis >= 3,
                   "grid.xi_eval_per_axis must be at least 3");
  }

  cfg.epsilon_target = num_or(j, "config", "epsilon_target", -1.0);
  cfg.stop_at_target = bool_or(j, "config", "stop_at_target", false);

  if (j.contains("pair")) {
    const json& jp = j.at("pair");
    if (!jp.is_array() || jp.size() != 2 || !jp[0].is_number_integer() ||
        !jp[1].is_number_integer())
      throw ConfigError("pair must be an array of two member labels");
    cfg.pair_m = jp[0].get<int>();
    cfg.pair_m_prime = jp[1].get<int>();
    require_config(cfg.pair_m >= 1 && cfg.pair_m_prime >= 1 &&
                       cfg.pair_m != cfg.pair_m_prime,
                   "pair must hold two distinct member labels >= 1");
  }

  if (j.contains("bound_overlay")) {
    const json& jb = j.at("bound_overlay");
    check_keys(jb, "bound_overlay",
               {"knob", "normalize", "allow_large_c", "assert_scaling_ok"});
    cfg.bound_overlay.enabled = true;
    cfg.bound_overlay.knob = num_or(jb, "bound_overlay", "knob", 1.0);
    require_config(cfg.bound_overlay.knob > 0,
                   "bound_overlay.knob must be positive");
    cfg.bound_overlay.normalize =
        bool_or(jb, "bound_overlay", "normalize", true);
    cfg.bound_overlay.allow_large_c =
        bool_or(jb, "bound_overlay", "allow_large_c", false);
    cfg.bound_overlay.assert_scaling_ok =
        bool_or(jb, "bound_overlay", "assert_scaling_ok", false);
  }

  cfg.out = str_or(j, "config", "out", "");
  cross_validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_file(path));
}

Kernel kernel_from_spec(const KernelSpec& spec) {
  if (spec.family == KernelFamily::SE) return Kernel::se(spec.lengthscale);
  return Kernel::matern(spec.nu, spec.lengthscale);
}

HardClass class_from_config(const ExperimentConfig& cfg) {
  Kernel k = kernel_from_spec(cfg.kernel);
  BuildOptions opts;
  if (cfg.grid.cert_per_axis > 0)
    opts.cert_grid_per_axis = cfg.grid.cert_per_axis;
  opts.kappa = cfg.cls.kappa;
  switch (cfg.cls.kind) {
    case ClassKind::StandardSE:
    case ClassKind::StandardMatern:
      return build_standard_class(k, cfg.cls.epsilon, cfg.cls.B, cfg.cls.dim,
                                  cfg.cls.kappa, opts);
    case ClassKind::SimplifiedMatern:
      return build_simplified_matern_class(cfg.kernel.nu,
                                           cfg.kernel.lengthscale,
                                           cfg.cls.epsilon, cfg.cls.B,
                                           cfg.cls.dim, cfg.cls.kappa, opts);
    case ClassKind::FinalPointRobust:
      return build_final_point_class(k, cfg.cls.xi, cfg.cls.epsilon, cfg.cls.B,
                                     cfg.cls.dim, cfg.cls.eta, opts);
  }
  throw ConfigError("unknown class kind");
}

// ---------------------------------------------------------------------------
// Statistics helpers.

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

WilsonInterval wilson95(long long successes, long long n) {
  require_config(n >= 0 && successes >= 0 && successes <= n,
                 "invalid success count");
  if (n == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double z2 = z * z;
  double nn = static_cast<double>(n);
  double p = static_cast<double>(successes) / nn;
  double denom = 1.0 + z2 / nn;
  double center = (p + z2 / (2.0 * nn)) / denom;
  double half =
      z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  require_config(x.size() == y.size() && x.size() >= 2,
                 "log-log fit needs at least two aligned points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require_config(x[i] > 0 && y[i] > 0,
                   "log-log fit needs positive coordinates");
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double denom = n * sxx - sx * sx;
  require_config(std::abs(denom) > 1e-12,
                 "log-log fit is degenerate: swept values coincide");
  LogLogFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

Aggregate aggregate_rows(const std::vector<ResultRow>& rows) {
  Aggregate agg;
  agg.n = static_cast<int>(rows.size());
  std::vector<double> rts, simples, xis, times, spents;
  for (const auto& r : rows) {
    if (std::isnan(r.R_T)) {
      agg.errored++;
      continue;
    }
    rts.push_back(r.R_T);
    simples.push_back(r.simple_regret);
    if (!std::isnan(r.xi_regret)) xis.push_back(r.xi_regret);
    times.push_back(r.time_to_eps ? static_cast<double>(*r.time_to_eps)
                                  : static_cast<double>(r.T));
    if (!r.time_to_eps) agg.censored++;
    spents.push_back(r.spent);
    if (r.success) agg.successes++;
  }
  if (!rts.empty()) {
    agg.mean_RT = std::accumulate(rts.begin(), rts.end(), 0.0) /
                  static_cast<double>(rts.size());
    agg.median_RT = median(rts);
    agg.mean_simple = std::accumulate(simples.begin(), simples.end(), 0.0) /
                      static_cast<double>(simples.size());
    agg.median_simple = median(simples);
    agg.median_time_to_eps = median(times);
    agg.mean_spent = std::accumulate(spents.begin(), spents.end(), 0.0) /
                     static_cast<double>(spents.size());
    agg.max_spent = *std::max_element(spents.begin(), spents.end());
  }
  if (!xis.empty()) agg.median_xi = median(xis);
  if (agg.n > 0) {
    agg.success_rate =
        static_cast<double>(agg.successes) / static_cast<double>(agg.n);
    auto iv = wilson95(agg.successes, agg.n);
    agg.success_lo = iv.lo;
    agg.success_hi = iv.hi;
  }
  return agg;
}

// ---------------------------------------------------------------------------
// Experiment execution.

namespace {

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto drain = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers - 1; ++w) pool.emplace_back(drain);
  drain();
  for (auto& t : pool) t.join();
}

double resolved_model_noise(const ExperimentConfig& cfg) {
  if (cfg.algorithm.model_noise_var >= 0) return cfg.algorithm.model_noise_var;
  // Floor for conditioning of the interpolation systems in noiseless runs.
  return std::max(cfg.noise_var, 1e-4);
}

bool row_success(const ExperimentConfig& cfg, const ResultRow& row) {
  switch (cfg.setting) {
    case BoundSetting::StandardSimple:
      return row.simple_regret <= cfg.target();
    case BoundSetting::CorruptedFinalPoint:
      return row.xi_regret <= cfg.target();
    case BoundSetting::StandardCumulative:
    case BoundSetting::CorruptedSamples:
      return row.R_T <= static_cast<double>(row.T) * cfg.target() / 2.0;
  }
  return false;
}

Trajectory simulate_cell(const ExperimentConfig& cfg, const HardClass& cls,
                         const Mat& grid, int ordinal, int replicate,
                         double* spent_out) {
  FunctionInstance f = cls.members[ordinal];
  ObservationModel oracle;
  oracle.f = [f](const Vec& x) { return f(x); };
  oracle.noise_sd = std::sqrt(cfg.noise_var);
  AdversaryState adv;
  if (cfg.adversary.enabled) {
    adv = AdversaryState::with_budget(cfg.adversary.budget,
                                      cfg.adversary.per_step_bound);
    oracle.adversary = &adv;
  }
  RunOptions opts;
  opts.B = cfg.cls.B;
  opts.model_noise_var = resolved_model_noise(cfg);
  opts.delta = cfg.algorithm.delta;
  opts.deterministic = cfg.algorithm.deterministic;
  opts.report = cfg.algorithm.report;
  opts.cls = &cls;
  opts.f_star = cls.member_peak_value(ordinal);
  if (cfg.stop_at_target) opts.stop_below = cfg.target();
  std::uint64_t seed = stream_seed(cfg.seed, ordinal, replicate);
  Trajectory tr;
  if (cfg.algorithm.name == "random") {
    tr = random_run(oracle, cfg.horizon, grid, seed, opts);
  } else {
    Kernel k = kernel_from_spec(cfg.kernel);
    tr = gp_ucb_run(k, oracle, cfg.horizon, grid, seed, opts);
  }
  if (spent_out) *spent_out = cfg.adversary.enabled ? adv.spent : 0.0;
  return tr;
}

ResultRow run_cell(const ExperimentConfig& cfg, const HardClass& cls,
                   const Mat& grid, int ordinal, int replicate) {
  ResultRow row;
  row.setting = to_string(cfg.setting);
  row.kind = to_string(cls.kind);
  row.member = cls.member_index(ordinal);
  row.replicate = replicate;
  row.T = cfg.horizon;
  try {
    double spent = 0.0;
    Trajectory tr =
        simulate_cell(cfg, cls, grid, ordinal, replicate, &spent);
    const FunctionInstance& f = cls.members[ordinal];
    row.T = tr.T;
    row.R_T = tr.cumulative_regret();
    row.simple_regret = tr.simple_regret();
    if (cls.kind == ClassKind::FinalPointRobust && tr.T > 0)
      row.xi_regret = std::max(
          0.0, xi_regret(f, tr.report_point, cls.xi, cfg.grid.xi_eval_per_axis));
    row.time_to_eps = time_to_epsilon(tr, cfg.target());
    row.spent = spent;
    row.success = row_success(cfg, row);
  } catch (const std::exception& e) {
    row.error = e.what();
    row.R_T = std::numeric_limits<double>::quiet_NaN();
    row.simple_regret = std::numeric_limits<double>::quiet_NaN();
    row.success = false;
  }
  return row;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers) {
  require_config(!cfg.sweep.enabled,
                 "config declares a sweep; use scaling_sweep / the sweep "
                 "subcommand");
  ExperimentResult out;
  out.config = cfg;
  HardClass cls = class_from_config(cfg);
  Mat grid = uniform_grid(cls.dim, cfg.grid.per_axis);
  const int members = static_cast<int>(cls.members.size());
  const int cells = members * cfg.replicates;
  out.rows.resize(cells);
  parallel_for(cells, workers, [&](int c) {
    int ordinal = c / cfg.replicates;
    int replicate = c % cfg.replicates;
    out.rows[c] = run_cell(cfg, cls, grid, ordinal, replicate);
  });
  out.agg = aggregate_rows(out.rows);
  return out;
}

Trajectory rerun_cell(const ExperimentConfig& cfg, int ordinal, int replicate) {
  require_config(!cfg.sweep.enabled,
                 "rerun_cell applies to single-point configs");
  HardClass cls = class_from_config(cfg);
  require_config(ordinal >= 0 && ordinal < cls.members_total(),
                 "member ordinal out of range");
  require_config(replicate >= 0 && replicate < cfg.replicates,
                 "replicate out of range");
  Mat grid = uniform_grid(cls.dim, cfg.grid.per_axis);
  return simulate_cell(cfg, cls, grid, ordinal, replicate, nullptr);
}

namespace {

std::string default_metric(const ExperimentConfig& cfg) {
  if (!cfg.sweep.metric.empty()) return cfg.sweep.metric;
  if (cfg.setting == BoundSetting::StandardSimple) return "time_to_eps";
  return "R_T";
}

double row_metric(const ResultRow& r, const std::string& metric) {
  if (metric == "R_T") return r.R_T;
  if (metric == "simple_regret") return r.simple_regret;
  if (metric == "xi_regret") return r.xi_regret;
  if (metric == "time_to_eps")
    return r.time_to_eps ? static_cast<double>(*r.time_to_eps)
                         : static_cast<double>(r.T);
  throw ConfigError("unknown sweep metric: " + metric);
}

ExperimentConfig config_at(const ExperimentConfig& cfg, std::size_t i) {
  ExperimentConfig point = cfg;
  point.sweep = SweepSpec{};
  double v = cfg.sweep.values[i];
  if (!cfg.sweep.horizons.empty()) point.horizon = cfg.sweep.horizons[i];
  if (cfg.sweep.parameter == "epsilon") {
    point.cls.epsilon = v;
    if (cfg.epsilon_target < 0) point.epsilon_target = -1.0;
  } else if (cfg.sweep.parameter == "T") {
    point.horizon = static_cast<int>(v);
  } else {  // C
    point.adversary.budget = v;
    if (cfg.sweep.epsilon_scale > 0) {
      require_config(point.horizon > 0,
                     "sweeping C with epsilon_scale needs a positive horizon");
      point.cls.epsilon =
          cfg.sweep.epsilon_scale *
          std::sqrt(v / static_cast<double>(point.horizon));
    }
  }
  return point;
}

BoundSpec bound_spec_at(const ExperimentConfig& point,
                        const BoundOverlaySpec& overlay) {
  BoundSpec spec;
  spec.setting = point.setting;
  spec.family = point.kernel.family;
  spec.epsilon = point.cls.epsilon;
  spec.B = point.cls.B;
  spec.noise_var = point.noise_var > 0 ? point.noise_var : 1.0;
  spec.delta = point.algorithm.delta;
  spec.dim = point.cls.dim;
  spec.nu = point.kernel.nu;
  spec.lengthscale = point.kernel.lengthscale;
  spec.C = point.adversary.budget;
  spec.xi = point.cls.xi;
  spec.T = static_cast<double>(point.horizon);
  spec.knob = overlay.knob;
  spec.allow_large_c = overlay.allow_large_c;
  spec.assert_scaling_ok = overlay.assert_scaling_ok;
  return spec;
}

}  // namespace

SweepResult scaling_sweep(const ExperimentConfig& cfg, int workers) {
  require_config(cfg.sweep.enabled, "config declares no sweep");
  SweepResult out;
  out.config = cfg;
  out.metric_name = default_metric(cfg);
  for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i) {
    SweepPoint pt;
    pt.value = cfg.sweep.values[i];
    ExperimentConfig point_cfg = config_at(cfg, i);
    pt.result = run_experiment(point_cfg, workers);
    std::vector<double> metrics;
    for (const auto& r : pt.result.rows)
      if (!std::isnan(r.R_T)) {
        double m = row_metric(r, out.metric_name);
        if (!std::isnan(m)) metrics.push_back(m);
      }
    pt.metric = median(metrics);
    pt.metric_lo = quantile(metrics, 0.25);
    pt.metric_hi = quantile(metrics, 0.75);
    if (cfg.bound_overlay.enabled)
      pt.bound = lower_bound(bound_spec_at(point_cfg, cfg.bound_overlay));
    out.points.push_back(std::move(pt));
  }
  if (cfg.bound_overlay.enabled) {
    out.has_bound = true;
    if (cfg.bound_overlay.normalize && !out.points.empty() &&
        out.points[0].bound > 0 && out.points[0].metric > 0) {
      double scale = out.points[0].metric / out.points[0].bound;
      for (auto& pt : out.points) pt.bound *= scale;
    }
  }
  std::vector<double> xs, ys;
  for (const auto& pt : out.points)
    if (!std::isnan(pt.metric) && pt.metric > 0 && pt.value > 0) {
      xs.push_back(pt.value);
      ys.push_back(pt.metric);
    }
  if (xs.size() >= 3) {
    auto fit = loglog_fit(xs, ys);
    out.slope_defined = true;
    out.slope = fit.slope;
    out.intercept = fit.intercept;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lemma verification suite.

namespace {

CheckResult make_check(const std::string& name, bool pass,
                       const std::string& measured) {
  CheckResult c;
  c.name = name;
  c.pass = pass;
  c.measured = measured;
  return c;
}

CheckResult make_skip(const std::string& name, const std::string& why) {
  CheckResult c;
  c.name = name;
  c.pass = true;
  c.skipped = true;
  c.measured = why;
  return c;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

bool is_grid_kind(ClassKind k) {
  return k == ClassKind::StandardMatern || k == ClassKind::SimplifiedMatern;
}

// Exhaustive lattice with about `budget` points total (inclusive per axis).
Mat audit_grid(int d, int budget) {
  int per_axis =
      std::max(2, static_cast<int>(std::floor(std::pow(budget, 1.0 / d))));
  return uniform_grid(d, per_axis);
}

struct PairRunStats {
  long long hits = 0;           // event: report ends in region m
  Vec region_counts;            // mean N_j over replicates
};

PairRunStats pair_runs(const ExperimentConfig& cfg, const HardClass& cls,
                       const Mat& grid, const FunctionInstance& f,
                       int target_region, std::uint64_t salt, int workers) {
  const int R = cfg.replicates;
  std::vector<long long> hit(R, 0);
  Mat counts = Mat::Zero(R, cls.regions());
  Kernel k = kernel_from_spec(cfg.kernel);
  parallel_for(R, workers, [&](int r) {
    ObservationModel oracle;
    oracle.f = [&f](const Vec& x) { return f(x); };
    oracle.noise_sd = std::sqrt(cfg.noise_var);
    RunOptions opts;
    opts.B = cfg.cls.B;
    opts.model_noise_var = resolved_model_noise(cfg);
    opts.delta = cfg.algorithm.delta;
    opts.report = cfg.algorithm.report;
    opts.cls = &cls;
    Trajectory tr = gp_ucb_run(k, oracle, cfg.horizon, grid,
                               stream_seed(cfg.seed, salt, r), opts);
    if (region_of(cls, tr.report_point) == target_region) hit[r] = 1;
    for (int j = 0; j < cls.regions(); ++j)
      counts(r, j) = static_cast<double>(tr.region_counts[j]);
  });
  PairRunStats st;
  for (int r = 0; r < R; ++r) st.hits += hit[r];
  st.region_counts = counts.colwise().mean().transpose();
  return st;
}

}  // namespace

bool VerifyReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.skipped && !c.pass) return false;
  return true;
}

std::string VerifyReport::to_text() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.skipped ? "[SKIP]" : (c.pass ? "[PASS]" : "[FAIL]")) << ' '
       << c.name;
    if (!c.measured.empty()) os << "  (" << c.measured << ')';
    os << '\n';
  }
  os << (all_pass() ? "all checks passed" : "some checks FAILED") << '\n';
  return os.str();
}

VerifyReport verify_lemmas(const ExperimentConfig& cfg, int workers) {
  VerifyReport rep;
  HardClass cls = class_from_config(cfg);
  const double eps = cls.epsilon;
  const bool robust = cls.kind == ClassKind::FinalPointRobust;

  // Member count bookkeeping against the floor formulas.
  if (is_grid_kind(cls.kind)) {
    double w = matern_width(eps, cls.kappa, cls.B, cls.kernel.nu);
    long long per_axis = static_cast<long long>(std::floor(1.0 / w + 1e-12));
    long long expect = 1;
    for (int ax = 0; ax < cls.dim; ++ax) expect *= per_axis;
    long long cap = packed_cell_count(w, cls.dim);
    bool ok = cls.M() == expect && cls.M() <= cap;
    rep.checks.push_back(make_check(
        "member-count", ok,
        "M=" + std::to_string(cls.M()) + " per-axis-floor=" +
            std::to_string(expect) + " volume-floor=" + std::to_string(cap)));
  } else {
    long long cells = 1;
    for (const auto& b : cls.axis_bounds)
      cells *= static_cast<long long>(b.size()) - 1;
    bool ok = cells == cls.regions() &&
              static_cast<long long>(cls.members.size()) ==
                  (robust ? cls.M() + 1 : cls.M());
    rep.checks.push_back(make_check(
        "member-count", ok,
        "M=" + std::to_string(cls.M()) + " regions=" +
            std::to_string(cls.regions())));
  }

  // Row/column/square sums of the per-region maxima stay O(eps).
  if (!robust) {
    Mat vbar = vbar_table(cls, cfg.grid.vbar_per_axis);
    double row_max = vbar.rowwise().sum().maxCoeff();
    double col_max = vbar.colwise().sum().maxCoeff();
    double sq_max = (vbar.array() * vbar.array()).colwise().sum().maxCoeff();
    bool ok = row_max <= 10.0 * eps && col_max <= 10.0 * eps &&
              sq_max <= 10.0 * eps * eps;
    rep.checks.push_back(make_check(
        "vbar-sum-bounds", ok,
        "row/eps=" + fmt(row_max / eps) + " col/eps=" + fmt(col_max / eps) +
            " sq/eps^2=" + fmt(sq_max / (eps * eps))));
  } else {
    rep.checks.push_back(
        make_skip("vbar-sum-bounds", "offset class: sums scale with M"));
  }

  // No point is eps-optimal for two members at once.
  if (!robust) {
    Mat g = audit_grid(cls.dim, 10000);
    int collisions = 0;
    for (int i = 0; i < g.rows(); ++i) {
      Vec x = g.row(i).transpose();
      int amb = 0;
      for (const auto& f : cls.members)
        if (f(x) >= eps * (1.0 - 1e-9)) ++amb;
      if (amb > 1) ++collisions;
    }
    rep.checks.push_back(make_check("eps-opt-uniqueness", collisions == 0,
                                    std::to_string(collisions) +
                                        " ambiguous points on " +
                                        std::to_string(g.rows()) + "-point grid"));
  } else {
    rep.checks.push_back(
        make_skip("eps-opt-uniqueness", "applies to peaked classes only"));
  }

  // Compact-support classes: supports never overlap.
  if (is_grid_kind(cls.kind)) {
    Mat g = audit_grid(cls.dim, 10000);
    int overlaps = 0;
    for (int i = 0; i < g.rows(); ++i) {
      Vec x = g.row(i).transpose();
      int nz = 0;
      for (const auto& f : cls.members)
        if (std::abs(f(x)) > 1e-12) ++nz;
      if (nz > 1) ++overlaps;
    }
    rep.checks.push_back(make_check(
        "support-disjoint", overlaps == 0,
        std::to_string(overlaps) + " overlapping points"));
  } else {
    rep.checks.push_back(
        make_skip("support-disjoint", "members share support"));
  }

  // Deterministic zero-information trajectory leaves most members below the
  // corruption budget.
  if (cfg.adversary.enabled) {
    Kernel k = kernel_from_spec(cfg.kernel);
    ObservationModel zero_oracle;
    zero_oracle.f = [](const Vec&) { return 0.0; };
    zero_oracle.noise_sd = 0.0;
    RunOptions opts;
    opts.B = cfg.cls.B;
    opts.model_noise_var = resolved_model_noise(cfg);
    opts.delta = cfg.algorithm.delta;
    opts.cls = &cls;
    opts.f_star = 0.0;
    Mat grid = uniform_grid(cls.dim, cfg.grid.per_axis);
    Trajectory tr = gp_ucb_run(k, zero_oracle, cfg.horizon, grid, cfg.seed,
                               opts);
    int cnt = corruptible_count(cls, tr.X, cfg.adversary.budget);
    int need = (cls.M() + 1) / 2;
    rep.checks.push_back(make_check(
        "corruptible-count", cnt >= need,
        std::to_string(cnt) + " of " + std::to_string(cls.M()) +
            " members corruptible (need " + std::to_string(need) + ")"));
  } else {
    rep.checks.push_back(make_skip("corruptible-count", "no adversary"));
  }

  // Monte-Carlo change-of-measure checks on an (m, m') pair.
  bool can_pair = !robust && cfg.noise_var > 0 && cls.M() >= 2 &&
                  cfg.replicates >= 20 && cfg.horizon > 0 &&
                  cfg.algorithm.name == "gp_ucb";
  if (can_pair) {
    int M = cls.M();
    int m = cfg.pair_m > 0 ? cfg.pair_m : std::max(1, M / 3);
    int mp = cfg.pair_m_prime > 0 ? cfg.pair_m_prime
                                  : std::min(M, std::max(m + 1, 2 * M / 3));
    require_config(m >= 1 && m <= M && mp >= 1 && mp <= M && m != mp,
                   "pair labels out of range for this class");
    const FunctionInstance& f_base = cls.members[m - 1];
    FunctionInstance bumped = cls.members[mp - 1];
    bumped.height *= 2.0;
    FunctionInstance f_alt;
    f_alt.shape = Shape::Composite;
    f_alt.center = Vec::Zero(cls.dim);
    f_alt.components = {f_base, bumped};

    Mat grid = uniform_grid(cls.dim, cfg.grid.per_axis);
    PairRunStats base =
        pair_runs(cfg, cls, grid, f_base, m - 1, 1000003, workers);
    PairRunStats alt =
        pair_runs(cfg, cls, grid, f_alt, m - 1, 2000003, workers);

    const long long R = cfg.replicates;
    auto iv_base = wilson95(base.hits, R);
    auto iv_alt = wilson95(alt.hits, R);
    double delta_hat = std::max(1.0 - iv_base.lo, iv_alt.hi);

    Mat vbar = vbar_table(cls, cfg.grid.vbar_per_axis);
    Vec dbar(cls.regions());
    for (int j = 0; j < cls.regions(); ++j) {
      double v = vbar(mp - 1, j);
      dbar(j) = 2.0 * v * v / cfg.noise_var;
    }

    if (delta_hat < 1.0 / 3.0) {
      auto rc = relating_check(base.region_counts, dbar, delta_hat);
      rep.checks.push_back(make_check(
          "relating-two-instances", rc.holds,
          "lhs=" + fmt(rc.lhs) + " rhs=" + fmt(rc.rhs) + " delta_hat=" +
              fmt(delta_hat) + " P_base=" + fmt(double(base.hits) / R) +
              " P_alt=" + fmt(double(alt.hits) / R)));
    } else {
      rep.checks.push_back(make_skip(
          "relating-two-instances",
          "hypotheses unmet: delta_hat=" + fmt(delta_hat) + " P_base=" +
              fmt(double(base.hits) / R) + " P_alt=" +
              fmt(double(alt.hits) / R)));
    }

    double div = divergence_decomposition(base.region_counts, dbar);
    double p0 = static_cast<double>(base.hits) / static_cast<double>(R);
    double pm = static_cast<double>(alt.hits) / static_cast<double>(R);
    double se = std::sqrt(p0 * (1 - p0) / static_cast<double>(R) +
                          pm * (1 - pm) / static_cast<double>(R));
    double diff = std::abs(pm - p0);
    double limit = std::sqrt(div) + 3.0 * se;
    rep.checks.push_back(make_check(
        "tv-divergence-bound", diff <= limit,
        "|dP|=" + fmt(diff) + " sqrt(div)=" + fmt(std::sqrt(div)) + " 3se=" +
            fmt(3.0 * se)));
  } else {
    rep.checks.push_back(make_skip(
        "relating-two-instances",
        "needs a peaked class, noise, >=20 replicates, and gp_ucb"));
    rep.checks.push_back(make_skip("tv-divergence-bound", "same requirements"));
  }

  // Budget conservation along adversarial trajectories.
  if (cfg.adversary.enabled) {
    Kernel k = kernel_from_spec(cfg.kernel);
    Mat grid = uniform_grid(cls.dim, cfg.grid.per_axis);
    double worst_gap = 0.0;
    double worst_spent = 0.0;
    int probes = std::min<int>(4, static_cast<int>(cls.members.size()));
    for (int i = 0; i < probes; ++i) {
      FunctionInstance f = cls.members[i];
      ObservationModel oracle;
      oracle.f = [&f](const Vec& x) { return f(x); };
      oracle.noise_sd = std::sqrt(cfg.noise_var);
      AdversaryState adv = AdversaryState::with_budget(
          cfg.adversary.budget, cfg.adversary.per_step_bound);
      oracle.adversary = &adv;
      RunOptions opts;
      opts.B = cfg.cls.B;
      opts.model_noise_var = resolved_model_noise(cfg);
      opts.cls = &cls;
      Trajectory tr = gp_ucb_run(k, oracle, cfg.horizon, grid,
                                 stream_seed(cfg.seed, 42, i), opts);
      double logged = (tr.ytilde - tr.y).cwiseAbs().sum();
      worst_gap = std::max(worst_gap, std::abs(logged - adv.spent));
      worst_spent = std::max(worst_spent, adv.spent);
    }
    bool ok = worst_gap <= 1e-9 &&
              worst_spent <= cfg.adversary.budget * (1.0 + 1e-12);
    rep.checks.push_back(make_check(
        "budget-conservation", ok,
        "max|log-spent|=" + fmt(worst_gap) + " max spent=" + fmt(worst_spent) +
            " C=" + fmt(cfg.adversary.budget)));
  } else {
    rep.checks.push_back(make_skip("budget-conservation", "no adversary"));
  }

  return rep;
}

// ---------------------------------------------------------------------------
// Serialization.

namespace {

std::string csv_num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_num(const std::string& s, const char* what) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError(std::string("bad numeric CSV field for ") + what + ": " +
                      s);
  }
  if (pos != s.size())
    throw ConfigError(std::string("bad numeric CSV field for ") + what + ": " +
                      s);
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

constexpr const char* kRowsHeader =
    "setting,kind,member,replicate,T,R_T,simple_regret,xi_regret,time_to_eps,"
    "spent,success";

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' ||
                          c == '-' || c == '_'
                      ? c
                      : '_');
  return out.empty() ? std::string("experiment") : out;
}

}  // namespace

std::string rows_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << kRowsHeader << '\n';
  for (const auto& r : rows) {
    os << r.setting << ',' << r.kind << ',' << r.member << ',' << r.replicate
       << ',' << r.T << ',' << csv_num(r.R_T) << ','
       << csv_num(r.simple_regret) << ',' << csv_num(r.xi_regret) << ',';
    if (r.time_to_eps) os << *r.time_to_eps;
    os << ',' << csv_num(r.spent) << ',' << (r.success ? 1 : 0) << '\n';
  }
  return os.str();
}

std::vector<ResultRow> parse_rows_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  require_config(static_cast<bool>(std::getline(is, line)),
                 "rows CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require_config(line == kRowsHeader, "rows CSV header mismatch");
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    require_config(f.size() == 11, "rows CSV line has wrong field count");
    ResultRow r;
    r.setting = f[0];
    r.kind = f[1];
    r.member = static_cast<int>(parse_num(f[2], "member"));
    r.replicate = static_cast<int>(parse_num(f[3], "replicate"));
    r.T = static_cast<int>(parse_num(f[4], "T"));
    r.R_T = parse_num(f[5], "R_T");
    r.simple_regret = parse_num(f[6], "simple_regret");
    r.xi_regret = parse_num(f[7], "xi_regret");
    if (!f[8].empty())
      r.time_to_eps = static_cast<int>(parse_num(f[8], "time_to_eps"));
    r.spent = parse_num(f[9], "spent");
    double s = parse_num(f[10], "success");
    require_config(s == 0.0 || s == 1.0, "success must be 0 or 1");
    r.success = s == 1.0;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string summary_csv(const Aggregate& agg) {
  std::ostringstream os;
  os << "n,errored,successes,success_rate,success_lo,success_hi,mean_RT,"
        "median_RT,mean_simple,median_simple,median_xi,median_time_to_eps,"
        "censored,mean_spent,max_spent\n";
  os << agg.n << ',' << agg.errored << ',' << agg.successes << ','
     << csv_num(agg.success_rate) << ',' << csv_num(agg.success_lo) << ','
     << csv_num(agg.success_hi) << ',' << csv_num(agg.mean_RT) << ','
     << csv_num(agg.median_RT) << ',' << csv_num(agg.mean_simple) << ','
     << csv_num(agg.median_simple) << ',' << csv_num(agg.median_xi) << ','
     << csv_num(agg.median_time_to_eps) << ',' << agg.censored << ','
     << csv_num(agg.mean_spent) << ',' << csv_num(agg.max_spent) << '\n';
  return os.str();
}

std::string plotdata_csv(const SweepResult& sweep) {
  std::ostringstream os;
  os << "curve,x,y,y_lo,y_hi\n";
  for (const auto& pt : sweep.points)
    os << "experiment," << csv_num(pt.value) << ',' << csv_num(pt.metric)
       << ',' << csv_num(pt.metric_lo) << ',' << csv_num(pt.metric_hi) << '\n';
  if (sweep.has_bound)
    for (const auto& pt : sweep.points)
      os << "bound," << csv_num(pt.value) << ',' << csv_num(pt.bound) << ','
         << csv_num(pt.bound) << ',' << csv_num(pt.bound) << '\n';
  return os.str();
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream os;
  os << "t";
  for (int ax = 0; ax < tr.X.cols(); ++ax) os << ",x" << ax;
  os << ",y,ytilde,r_t,region,spent\n";
  for (int t = 0; t < tr.T; ++t) {
    os << (t + 1);
    for (int ax = 0; ax < tr.X.cols(); ++ax) os << ',' << csv_num(tr.X(t, ax));
    os << ',' << csv_num(tr.y(t)) << ',' << csv_num(tr.ytilde(t)) << ','
       << csv_num(tr.inst_regret(t)) << ','
       << (tr.region.empty() ? -1 : tr.region[t]) << ','
       << csv_num(tr.spent_after(t)) << '\n';
  }
  return os.str();
}

BoundQuery parse_bound_query(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bound query is not valid JSON: ") +
                      e.what());
  }
  if (!j.is_object())
    throw ConfigError("bound query root must be a JSON object");
  check_keys(j, "bound query", {"schema_version", "bound", "sweep"});
  require_config(int_field(j, "bound query", "schema_version") == 1,
                 "unsupported schema_version (expected 1)");
  const json& jb = field(j, "bound query", "bound");
  check_keys(jb, "bound",
             {"setting", "family", "epsilon", "B", "noise_var", "delta", "dim",
              "nu", "lengthscale", "C", "xi", "T", "knob", "allow_large_c",
              "assert_scaling_ok"});
  BoundQuery q;
  q.spec.setting = bound_setting_from_string(str_field(jb, "bound", "setting"));
  q.spec.family = family_from_string(str_field(jb, "bound", "family"));
  q.spec.epsilon = num_or(jb, "bound", "epsilon", q.spec.epsilon);
  q.spec.B = num_or(jb, "bound", "B", q.spec.B);
  q.spec.noise_var = num_or(jb, "bound", "noise_var", q.spec.noise_var);
  q.spec.delta = num_or(jb, "bound", "delta", q.spec.delta);
  q.spec.dim = int_or(jb, "bound", "dim", q.spec.dim);
  q.spec.nu = num_or(jb, "bound", "nu", q.spec.nu);
  q.spec.lengthscale = num_or(jb, "bound", "lengthscale", q.spec.lengthscale);
  q.spec.C = num_or(jb, "bound", "C", q.spec.C);
  q.spec.xi = num_or(jb, "bound", "xi", q.spec.xi);
  q.spec.T = num_or(jb, "bound", "T", q.spec.T);
  q.spec.knob = num_or(jb, "bound", "knob", q.spec.knob);
  q.spec.allow_large_c =
      bool_or(jb, "bound", "allow_large_c", q.spec.allow_large_c);
  q.spec.assert_scaling_ok =
      bool_or(jb, "bound", "assert_scaling_ok", q.spec.assert_scaling_ok);
  if (j.contains("sweep")) {
    const json& js = j.at("sweep");
    check_keys(js, "sweep", {"parameter", "values"});
    q.parameter = str_field(js, "sweep", "parameter");
    require_config(q.parameter == "epsilon" || q.parameter == "T" ||
                       q.parameter == "C" || q.parameter == "B" ||
                       q.parameter == "noise_var",
                   "sweep.parameter must be epsilon, T, C, B, or noise_var");
    const json& vals = field(js, "sweep", "values");
    if (!vals.is_array() || vals.empty())
      throw ConfigError("sweep.values must be a nonempty array of numbers");
    for (const auto& v : vals) {
      if (!v.is_number())
        throw ConfigError("sweep.values must be a nonempty array of numbers");
      q.values.push_back(v.get<double>());
    }
  }
  return q;
}

std::string bound_curve_csv(const BoundQuery& q) {
  std::ostringstream os;
  os << "parameter,value,bound\n";
  if (q.parameter.empty()) {
    os << "none,0," << csv_num(lower_bound(q.spec)) << '\n';
    return os.str();
  }
  for (double v : q.values) {
    BoundSpec spec = q.spec;
    if (q.parameter == "epsilon")
      spec.epsilon = v;
    else if (q.parameter == "T")
      spec.T = v;
    else if (q.parameter == "C")
      spec.C = v;
    else if (q.parameter == "B")
      spec.B = v;
    else
      spec.noise_var = v;
    os << q.parameter << ',' << csv_num(v) << ','
       << csv_num(lower_bound(spec)) << '\n';
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
  if (!out) throw ConfigError("short write to file: " + path);
}

namespace {

std::string prepared_dir(const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + out_dir);
  return out_dir;
}

}  // namespace

std::vector<std::string> emit_result(const ExperimentResult& result,
                                     const std::string& out_dir,
                                     const std::string& format) {
  require_config(format == "csv" || format == "plotdata",
                 "format must be csv or plotdata");
  std::string dir = prepared_dir(out_dir);
  std::string base = dir + "/" + sanitize(result.config.name);
  std::vector<std::string> written;
  if (format == "csv") {
    write_file(base + "_rows.csv", rows_csv(result.rows));
    written.push_back(base + "_rows.csv");
    write_file(base + "_summary.csv", summary_csv(result.agg));
    written.push_back(base + "_summary.csv");
  } else {
    // A single run becomes a one-point curve keyed by its horizon.
    SweepResult s;
    s.config = result.config;
    SweepPoint pt;
    pt.value = static_cast<double>(result.config.horizon);
    pt.metric = result.agg.median_RT;
    pt.metric_lo = pt.metric;
    pt.metric_hi = pt.metric;
    s.points.push_back(pt);
    write_file(base + "_plotdata.csv", plotdata_csv(s));
    written.push_back(base + "_plotdata.csv");
  }
  return written;
}

std::vector<std::string> emit_sweep(const SweepResult& sweep,
                                    const std::string& out_dir,
                                    const std::string& format) {
  require_config(format == "csv" || format == "plotdata",
                 "format must be csv or plotdata");
  std::string dir = prepared_dir(out_dir);
  std::string base = dir + "/" + sanitize(sweep.config.name);
  std::vector<std::string> written;
  if (format == "csv") {
    for (const auto& pt : sweep.points) {
      char tag[48];
      std::snprintf(tag, sizeof(tag), "_%s_%g",
                    sweep.config.sweep.parameter.c_str(), pt.value);
      std::string path = base + tag + "_rows.csv";
      write_file(path, rows_csv(pt.result.rows));
      written.push_back(path);
    }
    std::ostringstream os;
    os << "parameter,value,metric,metric_value,metric_lo,metric_hi\n";
    for (const auto& pt : sweep.points)
      os << sweep.config.sweep.parameter << ',' << csv_num(pt.value) << ','
         << sweep.metric_name << ',' << csv_num(pt.metric) << ','
         << csv_num(pt.metric_lo) << ',' << csv_num(pt.metric_hi) << '\n';
    write_file(base + "_sweep.csv", os.str());
    written.push_back(base + "_sweep.csv");
    std::ostringstream fit;
    fit << "metric,slope_defined,slope,intercept,points\n";
    fit << sweep.metric_name << ',' << (sweep.slope_defined ? 1 : 0) << ','
        << csv_num(sweep.slope) << ',' << csv_num(sweep.intercept) << ','
        << sweep.points.size() << '\n';
    write_file(base + "_fit.csv", fit.str());
    written.push_back(base + "_fit.csv");
  } else {
    write_file(base + "_plotdata.csv", plotdata_csv(sweep));
    written.push_back(base + "_plotdata.csv");
  }
  return written;
}

}  // namespace gpb
