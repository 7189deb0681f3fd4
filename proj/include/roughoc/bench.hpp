#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughoc/direct.hpp"
#include "roughoc/shooting.hpp"

namespace roughoc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string problem = "ol";      // ol | fb | lqr
  std::string method = "both";     // indirect | direct | both
  std::optional<double> horizon;   // T; the problem default when unset
  int steps = 40;                  // N
  int samples = 10;                // M
  std::uint64_t master_seed = 0;
  double tolerance = 1e-6;
  int max_iters = 50;
  double fd_step = 1e-6;
  int repeats = 20;
  int eval_samples = 10000;
  std::vector<double> schedule{100, 90, 80, 70, 60, 50, 40, 30, 20, 10, 3};  // fb only
  std::vector<int> sample_sizes{5, 50};                                      // sweep-m only
  std::vector<double> alphas{0.1, 1.0, 10.0};                                // validate only
  std::string out_dir = "out";
  bool trajectories = false;

  /// Throws ConfigError.
  void validate() const;
  double effective_horizon() const;
  /// Every effective parameter as `key = value` lines, in the config file syntax.
  std::string resolved() const;
};

/// Sets one dotted key (e.g. "run.N"). Throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads `key = value` lines; '#' starts a comment. Values override `base`.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Problem instance for a config. fb takes R from the last schedule entry.
OcpProblem build_problem(const RunConfig& config, std::optional<double> control_weight = {});

struct ReportRow {
  std::string problem;
  std::string method;
  double horizon = 0.0;
  int steps = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  int run = 0;
  double wall_time_ms = 0.0;
  int iterations = 0;
  bool converged = false;
  double residual_inf = 0.0;
  std::optional<double> cost_mc_mean;
  std::optional<double> cost_mc_stderr;

  bool operator==(const ReportRow&) const = default;
};

struct TrajectoryRecord {
  int run = 0;
  std::string method;
  std::vector<SampledPath> states;
  std::vector<SampledPath> adjoints;  // empty for the direct method
  ControlSignal control;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<TrajectoryRecord> trajectories;
};

/// One solve of the configured problem with a given method on a given ensemble.
struct SolveOutcome {
  NewtonReport report;
  std::optional<ControlSignal> control;
  std::vector<SampledPath> states;
  std::vector<SampledPath> adjoints;
};

SolveOutcome solve_indirect(const RunConfig& config, const std::vector<GridRoughPath>& ensemble);
SolveOutcome solve_direct(const RunConfig& config, const std::vector<GridRoughPath>& ensemble);

/// Solve ensemble of repeat `run`, seeded from (master_seed, kSolve, run).
std::vector<GridRoughPath> solve_ensemble(const RunConfig& config, int run);

ExperimentReport run_experiment(const RunConfig& config);
ExperimentReport sweep_sample_sizes(const RunConfig& config, const std::vector<int>& sample_sizes);

struct SweepSummary {
  int samples = 0;
  int converged_runs = 0;
  double median_cost = 0.0;
  double mad_cost = 0.0;  // median absolute deviation
  bool insufficient = false;
};

std::vector<SweepSummary> summarize_sweep(const ExperimentReport& report, int repeats);

double median(std::vector<double> values);

/// median(direct wall time) / median(indirect wall time) over converged rows.
std::optional<double> median_speedup(const ExperimentReport& report);

std::string results_csv_header();
void write_results_csv(const ExperimentReport& report, std::ostream& out);
std::vector<ReportRow> parse_results_csv(std::istream& in);

/// Writes results.csv, config.resolved, plot.py and, when present, trajectories.csv.
/// Throws IoError.
void emit_report(const ExperimentReport& report, const RunConfig& config,
                 const std::filesystem::path& dir);

}  // namespace roughoc
