// Command-line front end: solve, bench, sweep-m, feedback, validate.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roughoc/bench.hpp"
#include "roughoc/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitIo = 3;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> problem;
  std::optional<std::string> method;
  std::optional<std::string> out;
  std::optional<int> steps;
  std::optional<int> samples;
  std::optional<double> horizon;
  std::vector<std::string> settings;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "config file with `key = value` lines");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--problem", o.problem, "ol | fb | lqr");
  cmd->add_option("--method", o.method, "indirect | direct | both");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--N", o.steps, "time steps");
  cmd->add_option("--M", o.samples, "noise samples");
  cmd->add_option("--T", o.horizon, "horizon");
  cmd->add_option("--set", o.settings, "extra `key=value` override, repeatable");
}

roughoc::RunConfig resolve(const Overrides& o) {
  roughoc::RunConfig c;
  if (!o.config_path.empty()) c = roughoc::load_config(o.config_path, c);
  for (const std::string& kv : o.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw roughoc::ConfigError("--set expects key=value, got '" + kv + "'");
    roughoc::apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) c.master_seed = *o.seed;
  if (o.problem) c.problem = *o.problem;
  if (o.method) c.method = *o.method;
  if (o.out) c.out_dir = *o.out;
  if (o.steps) c.steps = *o.steps;
  if (o.samples) c.samples = *o.samples;
  if (o.horizon) c.horizon = *o.horizon;
  return c;
}

void print_rows(const roughoc::ExperimentReport& report) {
  for (const auto& r : report.rows) {
    std::printf("%-4s %-9s run %3d  M %3d  %s  iters %3d  |res| %.3e  time %10.3f ms", r.problem.c_str(),
                r.method.c_str(), r.run, r.samples, r.converged ? "converged" : "FAILED   ",
                r.iterations, r.residual_inf, r.wall_time_ms);
    if (r.cost_mc_mean) std::printf("  cost %.6g +- %.2g", *r.cost_mc_mean, *r.cost_mc_stderr);
    std::printf("\n");
  }
}

int cmd_solve(roughoc::RunConfig c) {
  c.repeats = 1;
  c.trajectories = true;
  c.validate();
  const auto report = roughoc::run_experiment(c);
  roughoc::emit_report(report, c, c.out_dir);
  print_rows(report);
  for (const auto& r : report.rows)
    if (!r.converged) return kExitSolver;
  return kExitOk;
}

int cmd_bench(const roughoc::RunConfig& c) {
  c.validate();
  const auto report = roughoc::run_experiment(c);
  roughoc::emit_report(report, c, c.out_dir);
  print_rows(report);
  if (const auto s = roughoc::median_speedup(report))
    std::printf("median speedup (direct / indirect): %.2f\n", *s);
  return kExitOk;
}

int cmd_sweep(roughoc::RunConfig c) {
  c.method = "indirect";
  c.validate();
  const auto report = roughoc::sweep_sample_sizes(c, c.sample_sizes);
  roughoc::emit_report(report, c, c.out_dir);
  for (const auto& s : roughoc::summarize_sweep(report, c.repeats)) {
    std::printf("M %4d  converged %3d  median cost %.6g  MAD %.3g%s\n", s.samples, s.converged_runs,
                s.median_cost, s.mad_cost, s.insufficient ? "  (insufficient data)" : "");
  }
  return kExitOk;
}

int cmd_feedback(roughoc::RunConfig c) {
  c.problem = "fb";
  c.method = "indirect";
  c.validate();
  const auto report = roughoc::run_experiment(c);
  roughoc::emit_report(report, c, c.out_dir);
  print_rows(report);
  return kExitOk;
}

int cmd_validate(const roughoc::RunConfig& c) {
  bool all = true;
  for (const auto& r : roughoc::run_validation(c)) {
    std::printf("%s %-18s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    all = all && r.passed;
  }
  return all ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rough-path optimal control solvers and benchmarks"};
  app.require_subcommand(1);
  Overrides o;
  CLI::App* solve = app.add_subcommand("solve", "one run; writes trajectories");
  CLI::App* bench = app.add_subcommand("bench", "repeated runs for timing and cost");
  CLI::App* sweep = app.add_subcommand("sweep-m", "indirect method over sample sizes (sweep.M)");
  CLI::App* feedback = app.add_subcommand("feedback", "feedback-gain homotopy chain");
  CLI::App* validate = app.add_subcommand("validate", "numerical invariant suite");
  for (CLI::App* cmd : {solve, bench, sweep, feedback, validate}) add_common(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const roughoc::RunConfig c = resolve(o);
    if (solve->parsed()) return cmd_solve(c);
    if (bench->parsed()) return cmd_bench(c);
    if (sweep->parsed()) return cmd_sweep(c);
    if (feedback->parsed()) return cmd_feedback(c);
    return cmd_validate(c);
  } catch (const roughoc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const roughoc::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
}
