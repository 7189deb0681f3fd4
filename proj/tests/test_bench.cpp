#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "roughoc/bench.hpp"
#include "test_support.hpp"

namespace roughoc {
namespace {

using testing::Gen;

RunConfig parse(const std::string& text, RunConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("roughoc_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Config, DefaultsValidateAndResolve) {
  const RunConfig config;
  EXPECT_NO_THROW(config.validate());
  const std::string resolved = config.resolved();
  EXPECT_NE(resolved.find("solver.tolerance = 1e-06\n"), std::string::npos);
  EXPECT_NE(resolved.find("run.T = 2\n"), std::string::npos);
  EXPECT_NE(resolved.find("homotopy.schedule = 100, 90, 80, 70, 60, 50, 40, 30, 20, 10, 3\n"), std::string::npos);
}

TEST(Config, ParsesKeysCommentsAndLists) {
  const RunConfig config = parse(
      "# header\n"
      "run.problem = lqr   # trailing comment\n"
      "\n"
      "run.N = 64\n"
      "run.seed = 18446744073709551615\n"
      "solver.tolerance = 1e-9\n"
      "homotopy.schedule = 50, 20, 5\n"
      "output.trajectories = true\n");
  EXPECT_EQ(config.problem, "lqr");
  EXPECT_EQ(config.steps, 64);
  EXPECT_EQ(config.master_seed, 18446744073709551615ULL);
  EXPECT_DOUBLE_EQ(config.tolerance, 1e-9);
  EXPECT_EQ(config.schedule, (std::vector<double>{50, 20, 5}));
  EXPECT_TRUE(config.trajectories);
  EXPECT_DOUBLE_EQ(config.effective_horizon(), 1.0);
  EXPECT_EQ(config.samples, RunConfig{}.samples);
}

TEST(Config, LaterSourcesOverrideEarlier) {
  RunConfig base;
  base.steps = 7;
  base.samples = 9;
  RunConfig config = parse("run.N = 11\n", base);
  EXPECT_EQ(config.steps, 11);
  EXPECT_EQ(config.samples, 9);
  apply_setting(config, "run.N", "13");
  EXPECT_EQ(config.steps, 13);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse("run.bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse("run.N = ten\n"), ConfigError);
  EXPECT_THROW(parse("run.N = 10.5\n"), ConfigError);
  EXPECT_THROW(parse("just text\n"), ConfigError);
  EXPECT_THROW(parse("output.trajectories = maybe\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/roughoc.cfg"), ConfigError);
}

TEST(Config, ValidateRejectsInconsistentSettings) {
  auto invalid = [](const std::string& key, const std::string& value) {
    RunConfig c;
    apply_setting(c, key, value);
    EXPECT_THROW(c.validate(), ConfigError) << key << " = " << value;
  };
  invalid("run.problem", "pendulum");
  invalid("run.method", "magic");
  invalid("run.N", "0");
  invalid("run.M", "0");
  invalid("run.T", "-1");
  invalid("solver.tolerance", "0");
  invalid("run.repeats", "-1");
  invalid("homotopy.schedule", "10, 20");
  invalid("sweep.M", "5, 0");
  invalid("validate.alpha", "1, -1");
  RunConfig fb_direct;
  fb_direct.problem = "fb";
  fb_direct.method = "direct";
  EXPECT_THROW(fb_direct.validate(), ConfigError);
}

TEST(Config, ResolvedRoundTripsOnRandomConfigs) {
  Gen gen(71);
  const std::vector<std::string> problems{"ol", "lqr"};
  const std::vector<std::string> methods{"indirect", "direct", "both"};
  for (int trial = 0; trial < 50; ++trial) {
    RunConfig c;
    c.problem = problems[static_cast<std::size_t>(gen.integer(0, 1))];
    c.method = methods[static_cast<std::size_t>(gen.integer(0, 2))];
    if (trial % 2) c.horizon = gen.uniform(0.1, 5.0);
    c.steps = gen.integer(1, 500);
    c.samples = gen.integer(1, 100);
    c.master_seed = gen.engine()();
    c.tolerance = std::pow(10.0, gen.uniform(-12, -2));
    c.fd_step = gen.uniform(1e-9, 1e-4);
    c.repeats = gen.integer(0, 30);
    c.schedule = {gen.uniform(50, 100), gen.uniform(1, 49)};
    c.alphas = {gen.uniform(0.01, 10.0)};
    c.trajectories = trial % 3 == 0;
    const RunConfig back = parse(c.resolved());
    EXPECT_EQ(back.resolved(), c.resolved());
    EXPECT_EQ(back.tolerance, c.tolerance);
    EXPECT_EQ(back.schedule, c.schedule);
  }
}

ReportRow sample_row(int run) {
  ReportRow row;
  row.problem = "ol";
  row.method = run % 2 ? "direct" : "indirect";
  row.horizon = 2.0;
  row.steps = 40;
  row.samples = 10;
  row.seed = 123456789012345ULL;
  row.run = run;
  row.wall_time_ms = 12.5;
  row.iterations = 3;
  row.converged = run != 2;
  row.residual_inf = 3.25e-9;
  if (row.converged) {
    row.cost_mc_mean = 0.109;
    row.cost_mc_stderr = 0.0015;
  }
  return row;
}

TEST(ResultsCsv, RoundTripsWithQuotingAndMissingCosts) {
  ExperimentReport report;
  for (int run = 0; run < 4; ++run) report.rows.push_back(sample_row(run));
  report.rows[1].problem = "odd, \"quoted\" name";
  report.rows[3].residual_inf = INFINITY;
  std::ostringstream out;
  write_results_csv(report, out);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), results_csv_header());
  EXPECT_EQ(text.find('\r'), std::string::npos);
  std::istringstream in(text);
  const std::vector<ReportRow> back = parse_results_csv(in);
  ASSERT_EQ(back.size(), report.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    ReportRow expected = report.rows[i];
    EXPECT_NEAR(back[i].wall_time_ms, expected.wall_time_ms, 5e-4);
    expected.wall_time_ms = back[i].wall_time_ms;
    EXPECT_EQ(back[i], expected) << "row " << i;
  }
}

TEST(ResultsCsv, EmptyReportIsHeaderOnly) {
  std::ostringstream out;
  write_results_csv({}, out);
  EXPECT_EQ(out.str(), results_csv_header() + "\n");
  std::istringstream in(out.str());
  EXPECT_TRUE(parse_results_csv(in).empty());
}

TEST(ResultsCsv, RejectsMalformedInput) {
  std::istringstream wrong_header("a,b,c\n");
  EXPECT_THROW(parse_results_csv(wrong_header), IoError);
  std::istringstream short_row(results_csv_header() + "\nol,indirect,2\n");
  EXPECT_THROW(parse_results_csv(short_row), IoError);
}

TEST(Statistics, MedianAndSpeedup) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  ExperimentReport report;
  for (int run = 0; run < 4; ++run) {
    ReportRow ind = sample_row(0);
    ind.wall_time_ms = 10.0 + run;
    ReportRow dir = sample_row(1);
    dir.wall_time_ms = 40.0 + 2 * run;
    report.rows.push_back(ind);
    report.rows.push_back(dir);
  }
  ASSERT_TRUE(median_speedup(report).has_value());
  EXPECT_NEAR(*median_speedup(report), 43.0 / 11.5, 1e-12);
  EXPECT_FALSE(median_speedup(ExperimentReport{}).has_value());
}

TEST(Experiment, ZeroRepeatsWritesHeaderOnlyCsv) {
  RunConfig config;
  config.problem = "lqr";
  config.repeats = 0;
  const ExperimentReport report = run_experiment(config);
  EXPECT_TRUE(report.rows.empty());
  const auto dir = scratch_dir("zero");
  emit_report(report, config, dir);
  EXPECT_EQ(slurp(dir / "results.csv"), results_csv_header() + "\n");
  EXPECT_TRUE(std::filesystem::exists(dir / "config.resolved"));
  EXPECT_TRUE(std::filesystem::exists(dir / "plot.py"));
  EXPECT_FALSE(std::filesystem::exists(dir / "trajectories.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Experiment, LqrMethodsAgree) {
  RunConfig config;
  config.problem = "lqr";
  config.steps = 40;
  config.samples = 1;
  config.repeats = 1;
  config.eval_samples = 5;
  const ExperimentReport report = run_experiment(config);
  ASSERT_EQ(report.rows.size(), 2u);
  for (const ReportRow& row : report.rows) {
    EXPECT_TRUE(row.converged) << row.method;
    EXPECT_EQ(row.steps, 40);
    EXPECT_DOUBLE_EQ(row.horizon, 1.0);
    ASSERT_TRUE(row.cost_mc_mean.has_value());
  }
  EXPECT_NEAR(*report.rows[0].cost_mc_mean, *report.rows[1].cost_mc_mean, 1e-4);
}

TEST(Experiment, RowsAreReproducibleUpToWallTime) {
  RunConfig config;
  config.problem = "ol";
  config.steps = 20;
  config.samples = 3;
  config.repeats = 2;
  config.eval_samples = 50;
  config.master_seed = 99;
  ExperimentReport a = run_experiment(config);
  ExperimentReport b = run_experiment(config);
  ASSERT_EQ(a.rows.size(), 4u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    a.rows[i].wall_time_ms = b.rows[i].wall_time_ms = 0.0;
    EXPECT_EQ(a.rows[i], b.rows[i]);
  }
  EXPECT_NE(a.rows[0].cost_mc_mean, a.rows[2].cost_mc_mean);  // distinct repeats see distinct noise
}

TEST(Experiment, SolveEnsemblesDifferAcrossRuns) {
  RunConfig config;
  config.steps = 10;
  config.samples = 2;
  const auto first = solve_ensemble(config, 0);
  const auto second = solve_ensemble(config, 1);
  EXPECT_NE(first[0].base[10], second[0].base[10]);
  EXPECT_EQ(first[0].base[10], solve_ensemble(config, 0)[0].base[10]);
}

TEST(Sweep, SingleSizeMatchesExperiment) {
  RunConfig config;
  config.problem = "ol";
  config.method = "indirect";
  config.steps = 20;
  config.samples = 4;
  config.repeats = 2;
  config.eval_samples = 30;
  ExperimentReport sweep = sweep_sample_sizes(config, {4});
  ExperimentReport plain = run_experiment(config);
  ASSERT_EQ(sweep.rows.size(), plain.rows.size());
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    sweep.rows[i].wall_time_ms = plain.rows[i].wall_time_ms = 0.0;
    EXPECT_EQ(sweep.rows[i], plain.rows[i]);
  }
  EXPECT_THROW(sweep_sample_sizes(config, {}), ConfigError);
}

TEST(Sweep, SummaryFlagsInsufficientRuns) {
  ExperimentReport report;
  for (int run = 0; run < 3; ++run) {
    ReportRow row = sample_row(0);
    row.samples = 5;
    row.run = run;
    row.cost_mc_mean = 1.0 + run;
    report.rows.push_back(row);
  }
  ReportRow failed = sample_row(2);
  failed.samples = 50;
  report.rows.push_back(failed);
  const auto summary = summarize_sweep(report, 3);
  ASSERT_EQ(summary.size(), 2u);
  EXPECT_EQ(summary[0].samples, 5);
  EXPECT_EQ(summary[0].converged_runs, 3);
  EXPECT_DOUBLE_EQ(summary[0].median_cost, 2.0);
  EXPECT_DOUBLE_EQ(summary[0].mad_cost, 1.0);
  EXPECT_FALSE(summary[0].insufficient);
  EXPECT_TRUE(summary[1].insufficient);
}

TEST(Emit, WritesTrajectoriesWhenRequested) {
  RunConfig config;
  config.problem = "lqr";
  config.method = "both";
  config.steps = 5;
  config.samples = 1;
  config.repeats = 1;
  config.eval_samples = 3;
  config.trajectories = true;
  const ExperimentReport report = run_experiment(config);
  const auto dir = scratch_dir("traj");
  emit_report(report, config, dir);
  const std::string traj = slurp(dir / "trajectories.csv");
  std::istringstream lines(traj);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header.substr(0, 15), "run,sample,k,t,");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, config.steps + 1);
  EXPECT_EQ(slurp(dir / "config.resolved"), config.resolved());
  std::filesystem::remove_all(dir);
}

TEST(Emit, UnwritableDirectoryRaisesIoError) {
  EXPECT_THROW(emit_report({}, RunConfig{}, "/proc/roughoc_denied/out"), IoError);
}

}  // namespace
}  // namespace roughoc
