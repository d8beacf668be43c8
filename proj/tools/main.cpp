// Command-line front end: build hard-instance classes, run bandit
// experiments, sweep scaling parameters, verify the change-of-measure
// machinery, and evaluate sample-complexity / regret lower bounds.
//
// Exit codes: 0 success, 1 config error, 2 numerical failure,
// 3 verification failures.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpbandit/gpbandit.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int workers = 1;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts* o, bool need_config = true) {
  auto* c = cmd->add_option("--config", o->config_path, "JSON config path");
  if (need_config) c->required();
  cmd->add_option("--seed", o->seed, "override the config's master seed")
      ->each([o](const std::string&) { o->seed_set = true; });
  cmd->add_option("--out", o->out, "output directory (overrides config)");
  cmd->add_option("--workers", o->workers, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", o->format, "output format")
      ->check(CLI::IsMember({"csv", "plotdata"}));
}

gpb::ExperimentConfig load_with_overrides(const CommonOpts& o) {
  gpb::ExperimentConfig cfg = gpb::load_config(o.config_path);
  if (o.seed_set) cfg.seed = o.seed;
  if (!o.out.empty()) cfg.out = o.out;
  if (cfg.out.empty()) cfg.out = "out";
  return cfg;
}

int cmd_build_class(const CommonOpts& o) {
  gpb::ExperimentConfig cfg = load_with_overrides(o);
  gpb::HardClass cls = gpb::class_from_config(cfg);
  double max_cert = 0.0;
  for (const auto& f : cls.members)
    max_cert = std::max(max_cert, f.norm_certificate);
  std::printf("kind=%s dim=%d members=%d hard=%d regions=%d\n",
              gpb::to_string(cls.kind).c_str(), cls.dim, cls.members_total(),
              cls.M(), cls.regions());
  std::printf("epsilon=%.6g width=%.6g B=%.6g max_certificate=%.6g\n",
              cls.epsilon, cls.width, cls.B, max_cert);
  if (!o.out.empty() || !cfg.out.empty()) {
    std::string dir = cfg.out;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw gpb::ConfigError("cannot create output directory: " + dir);
    std::string path = dir + "/" + cfg.name + "_manifest.json";
    gpb::write_file(path, gpb::to_manifest(cls));
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

int cmd_run(const CommonOpts& o) {
  gpb::ExperimentConfig cfg = load_with_overrides(o);
  gpb::ExperimentResult result = gpb::run_experiment(cfg, o.workers);
  for (const auto& path : gpb::emit_result(result, cfg.out, o.format))
    std::printf("wrote %s\n", path.c_str());
  if (o.format == "csv" && !result.rows.empty()) {
    gpb::Trajectory tr = gpb::rerun_cell(cfg, 0, 0);
    std::string path = cfg.out + "/" + cfg.name + "_trajectory.csv";
    gpb::write_file(path, gpb::trajectory_csv(tr));
    std::printf("wrote %s\n", path.c_str());
  }
  const gpb::Aggregate& a = result.agg;
  std::printf(
      "cells=%d errored=%d median_RT=%.6g median_simple=%.6g "
      "success=%lld/%d [%.3f, %.3f]\n",
      a.n, a.errored, a.median_RT, a.median_simple,
      static_cast<long long>(a.successes), a.n, a.success_lo, a.success_hi);
  if (a.errored > 0) {
    for (const auto& r : result.rows)
      if (!r.error.empty())
        std::fprintf(stderr, "numerical failure (member %d, replicate %d): %s\n",
                     r.member, r.replicate, r.error.c_str());
    return 2;
  }
  return 0;
}

int cmd_sweep(const CommonOpts& o) {
  gpb::ExperimentConfig cfg = load_with_overrides(o);
  gpb::SweepResult sweep = gpb::scaling_sweep(cfg, o.workers);
  for (const auto& path : gpb::emit_sweep(sweep, cfg.out, o.format))
    std::printf("wrote %s\n", path.c_str());
  int errored = 0;
  for (const auto& pt : sweep.points) {
    errored += pt.result.agg.errored;
    std::printf("%s=%.6g  %s=%.6g  [%.6g, %.6g]\n",
                cfg.sweep.parameter.c_str(), pt.value,
                sweep.metric_name.c_str(), pt.metric, pt.metric_lo,
                pt.metric_hi);
  }
  if (sweep.slope_defined)
    std::printf("log-log slope of %s vs %s: %.4f\n", sweep.metric_name.c_str(),
                cfg.sweep.parameter.c_str(), sweep.slope);
  if (errored > 0) {
    std::fprintf(stderr, "%d cells hit numerical failures\n", errored);
    return 2;
  }
  return 0;
}

int cmd_verify(const CommonOpts& o) {
  gpb::ExperimentConfig cfg = load_with_overrides(o);
  gpb::VerifyReport rep = gpb::verify_lemmas(cfg, o.workers);
  std::fputs(rep.to_text().c_str(), stdout);
  return rep.all_pass() ? 0 : 3;
}

int cmd_bounds(const CommonOpts& o) {
  gpb::BoundQuery q = gpb::parse_bound_query(gpb::read_file(o.config_path));
  std::string csv = gpb::bound_curve_csv(q);
  std::fputs(csv.c_str(), stdout);
  if (!o.out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    if (ec) throw gpb::ConfigError("cannot create output directory: " + o.out);
    std::string path = o.out + "/bounds.csv";
    gpb::write_file(path, csv);
    std::fprintf(stderr, "wrote %s\n", path.c_str());
  }
  return 0;
}

int cmd_emit(const CommonOpts& o) {
  gpb::ExperimentConfig cfg = load_with_overrides(o);
  std::string rows_path = cfg.out + "/" + cfg.name + "_rows.csv";
  std::vector<gpb::ResultRow> rows =
      gpb::parse_rows_csv(gpb::read_file(rows_path));
  gpb::Aggregate agg = gpb::aggregate_rows(rows);
  if (o.format == "csv") {
    std::string path = cfg.out + "/" + cfg.name + "_summary.csv";
    gpb::write_file(path, gpb::summary_csv(agg));
    std::printf("wrote %s\n", path.c_str());
  } else {
    gpb::SweepResult s;
    s.config = cfg;
    gpb::SweepPoint pt;
    pt.value = static_cast<double>(cfg.horizon);
    pt.metric = agg.median_RT;
    pt.metric_lo = pt.metric;
    pt.metric_hi = pt.metric;
    s.points.push_back(pt);
    std::string path = cfg.out + "/" + cfg.name + "_plotdata.csv";
    gpb::write_file(path, gpb::plotdata_csv(s));
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulation testbed for kernelized bandit lower-bound constructions"};
  app.require_subcommand(1);

  CommonOpts o;
  auto* build = app.add_subcommand(
      "build-class", "build a hard-instance class and report its facts");
  add_common(build, &o);
  auto* run = app.add_subcommand(
      "run", "run one experiment config over all members and replicates");
  add_common(run, &o);
  auto* sweep = app.add_subcommand(
      "sweep", "run a parameter sweep and fit the scaling slope");
  add_common(sweep, &o);
  auto* verify = app.add_subcommand(
      "verify-lemmas", "check the proof-machinery invariants on a config");
  add_common(verify, &o);
  auto* bounds = app.add_subcommand(
      "bounds", "evaluate lower-bound formulas from a bound-query config");
  add_common(bounds, &o);
  auto* emit = app.add_subcommand(
      "emit", "re-read emitted rows and regenerate derived artifacts");
  add_common(emit, &o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return cmd_build_class(o);
    if (run->parsed()) return cmd_run(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (verify->parsed()) return cmd_verify(o);
    if (bounds->parsed()) return cmd_bounds(o);
    if (emit->parsed()) return cmd_emit(o);
  } catch (const gpb::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const gpb::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
