#include "roughoc/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace roughoc {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("bad value for " + key + ": '" + text + "'");
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, item));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>)
      out += fmt_double(values[i]);
    else
      out += std::to_string(values[i]);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("bad value for " + key + ": '" + text + "'");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string opt_field(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

std::vector<Vec> initial_states(const OcpProblem& problem, std::size_t samples) {
  return std::vector<Vec>(samples, problem.x0);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void check_written(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw IoError("failed writing " + path.string());
}

constexpr const char* kPlotScript = R"(import csv
import statistics
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
rows = list(csv.DictReader(open(here / "results.csv", newline="")))

fig, axes = plt.subplots(1, 2, figsize=(10, 4))
by_method = {}
for r in rows:
    if r["converged"] == "1":
        by_method.setdefault(r["method"], []).append(float(r["wall_time_ms"]))
axes[0].bar(list(by_method), [statistics.median(v) for v in by_method.values()])
axes[0].set_ylabel("median wall time [ms]")

by_m = {}
for r in rows:
    if r["converged"] == "1" and r["cost_mc_mean"]:
        by_m.setdefault(int(r["M"]), []).append(float(r["cost_mc_mean"]))
ms = sorted(by_m)
med = [statistics.median(by_m[m]) for m in ms]
mad = [statistics.median([abs(c - md) for c in by_m[m]]) for m, md in zip(ms, med)]
axes[1].errorbar(ms, med, yerr=mad, marker="o", capsize=3)
axes[1].set_xlabel("M")
axes[1].set_ylabel("MC cost")

traj = here / "trajectories.csv"
if traj.exists():
    t_rows = list(csv.DictReader(open(traj, newline="")))
    fig2, ax = plt.subplots(figsize=(6, 4))
    xcols = [c for c in t_rows[0] if c.startswith("x_")] if t_rows else []
    for s in sorted({r["sample"] for r in t_rows}):
        pts = [r for r in t_rows if r["sample"] == s]
        for c in xcols:
            ax.plot([float(r["t"]) for r in pts], [float(r[c]) for r in pts], lw=0.7)
    ax.set_xlabel("t")
    fig2.savefig(here / "trajectories.png", dpi=120)

fig.tight_layout()
fig.savefig(here / "results.png", dpi=120)
)";

}  // namespace

void RunConfig::validate() const {
  if (problem != "ol" && problem != "fb" && problem != "lqr")
    throw ConfigError("run.problem must be ol, fb or lqr");
  if (method != "indirect" && method != "direct" && method != "both")
    throw ConfigError("run.method must be indirect, direct or both");
  if (problem == "fb" && method != "indirect")
    throw ConfigError("the fb problem is solved by homotopy; use run.method = indirect");
  if (horizon && !(*horizon > 0.0)) throw ConfigError("run.T must be > 0");
  if (steps < 1) throw ConfigError("run.N must be >= 1");
  if (samples < 1) throw ConfigError("run.M must be >= 1");
  if (!(tolerance > 0.0)) throw ConfigError("solver.tolerance must be > 0");
  if (max_iters < 1) throw ConfigError("solver.max_iters must be >= 1");
  if (!(fd_step > 0.0)) throw ConfigError("solver.fd_step must be > 0");
  if (repeats < 0) throw ConfigError("run.repeats must be >= 0");
  if (eval_samples < 1) throw ConfigError("eval.samples must be >= 1");
  if (schedule.empty()) throw ConfigError("homotopy.schedule must be nonempty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0)) throw ConfigError("homotopy.schedule entries must be > 0");
    if (i > 0 && !(schedule[i] < schedule[i - 1]))
      throw ConfigError("homotopy.schedule must be strictly decreasing");
  }
  if (sample_sizes.empty()) throw ConfigError("sweep.M must be nonempty");
  for (int m : sample_sizes)
    if (m < 1) throw ConfigError("sweep.M entries must be >= 1");
  if (alphas.empty()) throw ConfigError("validate.alpha must be nonempty");
  for (double a : alphas)
    if (!(a > 0.0)) throw ConfigError("validate.alpha entries must be > 0");
  if (out_dir.empty()) throw ConfigError("output.dir must be nonempty");
}

double RunConfig::effective_horizon() const {
  if (horizon) return *horizon;
  return problem == "lqr" ? scalar_lqr_test().horizon : SpacecraftConfig{}.horizon;
}

std::string RunConfig::resolved() const {
  std::ostringstream out;
  out << "run.problem = " << problem << "\n"
      << "run.method = " << method << "\n"
      << "run.T = " << fmt_double(effective_horizon()) << "\n"
      << "run.N = " << steps << "\n"
      << "run.M = " << samples << "\n"
      << "run.seed = " << master_seed << "\n"
      << "run.repeats = " << repeats << "\n"
      << "solver.tolerance = " << fmt_double(tolerance) << "\n"
      << "solver.max_iters = " << max_iters << "\n"
      << "solver.fd_step = " << fmt_double(fd_step) << "\n"
      << "eval.samples = " << eval_samples << "\n"
      << "homotopy.schedule = " << join(schedule) << "\n"
      << "sweep.M = " << join(sample_sizes) << "\n"
      << "validate.alpha = " << join(alphas) << "\n"
      << "output.dir = " << out_dir << "\n"
      << "output.trajectories = " << (trajectories ? "true" : "false") << "\n";
  return out.str();
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "run.problem") c.problem = value;
  else if (key == "run.method") c.method = value;
  else if (key == "run.T") c.horizon = parse_number<double>(key, value);
  else if (key == "run.N") c.steps = parse_number<int>(key, value);
  else if (key == "run.M") c.samples = parse_number<int>(key, value);
  else if (key == "run.seed") c.master_seed = parse_number<std::uint64_t>(key, value);
  else if (key == "run.repeats") c.repeats = parse_number<int>(key, value);
  else if (key == "solver.tolerance") c.tolerance = parse_number<double>(key, value);
  else if (key == "solver.max_iters") c.max_iters = parse_number<int>(key, value);
  else if (key == "solver.fd_step") c.fd_step = parse_number<double>(key, value);
  else if (key == "eval.samples") c.eval_samples = parse_number<int>(key, value);
  else if (key == "homotopy.schedule") c.schedule = parse_list<double>(key, value);
  else if (key == "sweep.M") c.sample_sizes = parse_list<int>(key, value);
  else if (key == "validate.alpha") c.alphas = parse_list<double>(key, value);
  else if (key == "output.dir") c.out_dir = value;
  else if (key == "output.trajectories") c.trajectories = parse_bool(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in, std::move(base));
}

OcpProblem build_problem(const RunConfig& config, std::optional<double> control_weight) {
  if (config.problem == "lqr") {
    OcpProblem p = scalar_lqr_test();
    p.horizon = config.effective_horizon();
    return p;
  }
  SpacecraftConfig sc;
  sc.horizon = config.effective_horizon();
  if (control_weight) sc.control_weight = *control_weight;
  else if (config.problem == "fb") sc.control_weight = config.schedule.back();
  return make_problem(config.problem, sc);
}

std::vector<GridRoughPath> solve_ensemble(const RunConfig& config, int run) {
  const OcpProblem problem = build_problem(config);
  const TimeGrid grid(0.0, problem.horizon, config.steps);
  const EnsembleSpec spec{config.samples, problem.d(),
                          derive_seed(config.master_seed, StreamTag::kSolve,
                                      static_cast<std::uint64_t>(run))};
  return lift_ensemble(brownian_sample(spec, grid));
}

SolveOutcome solve_indirect(const RunConfig& config, const std::vector<GridRoughPath>& ensemble) {
  const NewtonOptions opts{config.tolerance, config.max_iters, config.fd_step};
  const OcpProblem problem = build_problem(config);
  const std::vector<Vec> x0s = initial_states(problem, ensemble.size());
  SolveOutcome out;
  ShootingUnknowns unknowns;

  if (config.problem == "fb") {
    const auto family = [&config](double r) { return build_problem(config, r); };
    HomotopyResult h = homotopy_solve(family, config.schedule, ensemble, x0s, opts);
    for (const auto& step : h.steps) {
      out.report.iterations += step.report.iterations;
      out.report.wall_time_ms += step.report.wall_time_ms;
      out.report.history.insert(out.report.history.end(), step.report.history.begin(),
                                step.report.history.end());
    }
    const HomotopyStep& last = h.steps.back();
    out.report.converged = h.completed;
    out.report.residual_inf = last.report.residual_inf;
    if (!h.completed)
      out.report.failure = "homotopy stopped at R = " + fmt_double(last.parameter) + ": " +
                           last.report.failure;
    unknowns = last.unknowns;
  } else {
    ShootingResult res = newton_solve(problem, ensemble, x0s,
                                      ShootingUnknowns::zeros(static_cast<int>(ensemble.size()),
                                                              problem.n()),
                                      opts);
    out.report = std::move(res.report);
    unknowns = std::move(res.unknowns);
  }

  if (out.report.converged) {
    CoupledTrajectories traj = integrate_coupled(problem, x0s, unknowns.split(problem.n()), ensemble);
    out.control = std::move(traj.control);
    out.states = std::move(traj.states);
    out.adjoints = std::move(traj.adjoints);
  }
  return out;
}

SolveOutcome solve_direct(const RunConfig& config, const std::vector<GridRoughPath>& ensemble) {
  const OcpProblem problem = build_problem(config);
  const std::vector<Vec> x0s = initial_states(problem, ensemble.size());
  const Transcription tr(problem, ensemble, x0s);
  const SqpResult res =
      sqp_solve(tr, Vec::Zero(tr.num_vars()), SqpOptions{config.tolerance, config.max_iters});
  SolveOutcome out;
  out.report = res.report;
  if (out.report.converged) {
    DecisionVector dv = tr.unpack(res.solution);
    out.control = std::move(dv.control);
    out.states = std::move(dv.states);
  }
  return out;
}

namespace {

void run_one(const RunConfig& config, int run, ExperimentReport& report) {
  const OcpProblem problem = build_problem(config);
  const std::vector<GridRoughPath> ensemble = solve_ensemble(config, run);
  const std::uint64_t seed =
      derive_seed(config.master_seed, StreamTag::kSolve, static_cast<std::uint64_t>(run));
  const EnsembleSpec eval{config.eval_samples, problem.d(),
                          derive_seed(config.master_seed, StreamTag::kEvaluate,
                                      static_cast<std::uint64_t>(run))};

  std::vector<std::string> methods;
  if (config.method != "direct") methods.push_back("indirect");
  if (config.method != "indirect") methods.push_back("direct");

  for (const std::string& method : methods) {
    SolveOutcome outcome;
    try {
      outcome = method == "indirect" ? solve_indirect(config, ensemble)
                                     : solve_direct(config, ensemble);
    } catch (const std::exception& e) {
      outcome.report.converged = false;
      outcome.report.failure = e.what();
      outcome.control.reset();
    }
    ReportRow row{problem.name, method, problem.horizon, config.steps,
                  static_cast<int>(ensemble.size()), seed, run, outcome.report.wall_time_ms,
                  outcome.report.iterations, outcome.report.converged, outcome.report.residual_inf,
                  std::nullopt, std::nullopt};
    if (outcome.control) {
      const CostEstimate cost = evaluate_cost_mc(problem, *outcome.control, eval);
      row.cost_mc_mean = cost.mean;
      row.cost_mc_stderr = cost.std_error;
      if (config.trajectories)
        report.trajectories.push_back(
            {run, method, std::move(outcome.states), std::move(outcome.adjoints), *outcome.control});
    }
    report.rows.push_back(std::move(row));
  }
}

}  // namespace

ExperimentReport run_experiment(const RunConfig& config) {
  config.validate();
  ExperimentReport report;
  for (int run = 0; run < config.repeats; ++run) run_one(config, run, report);
  return report;
}

ExperimentReport sweep_sample_sizes(const RunConfig& config, const std::vector<int>& sample_sizes) {
  if (sample_sizes.empty()) throw ConfigError("sweep_sample_sizes: empty sample-size list");
  RunConfig c = config;
  c.method = "indirect";
  ExperimentReport report;
  for (int m : sample_sizes) {
    c.samples = m;
    c.validate();
    for (int run = 0; run < c.repeats; ++run) run_one(c, run, report);
  }
  return report;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SweepSummary> summarize_sweep(const ExperimentReport& report, int repeats) {
  std::map<int, std::vector<double>> costs;
  for (const ReportRow& r : report.rows) {
    auto& bucket = costs[r.samples];
    if (r.converged && r.cost_mc_mean) bucket.push_back(*r.cost_mc_mean);
  }
  std::vector<SweepSummary> out;
  for (const auto& [m, values] : costs) {
    SweepSummary s;
    s.samples = m;
    s.converged_runs = static_cast<int>(values.size());
    s.insufficient = values.empty() || s.converged_runs < repeats;
    if (!values.empty()) {
      s.median_cost = median(values);
      std::vector<double> dev;
      for (double v : values) dev.push_back(std::abs(v - s.median_cost));
      s.mad_cost = median(dev);
    }
    out.push_back(s);
  }
  return out;
}

std::optional<double> median_speedup(const ExperimentReport& report) {
  std::vector<double> direct;
  std::vector<double> indirect;
  for (const ReportRow& r : report.rows) {
    if (!r.converged) continue;
    (r.method == "direct" ? direct : indirect).push_back(r.wall_time_ms);
  }
  if (direct.empty() || indirect.empty()) return std::nullopt;
  const double denom = median(indirect);
  if (!(denom > 0.0)) return std::nullopt;
  return median(direct) / denom;
}

std::string results_csv_header() {
  return "problem,method,T,N,M,seed,run,wall_time_ms,iterations,converged,residual_inf,"
         "cost_mc_mean,cost_mc_stderr";
}

void write_results_csv(const ExperimentReport& report, std::ostream& out) {
  out << results_csv_header() << "\n";
  for (const ReportRow& r : report.rows) {
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", r.wall_time_ms);
    out << csv_field(r.problem) << ',' << csv_field(r.method) << ',' << fmt_double(r.horizon) << ','
        << r.steps << ',' << r.samples << ',' << r.seed << ',' << r.run << ',' << wall << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << fmt_double(r.residual_inf) << ','
        << opt_field(r.cost_mc_mean) << ',' << opt_field(r.cost_mc_stderr) << "\n";
  }
}

std::vector<ReportRow> parse_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != results_csv_header())
    throw IoError("results.csv: missing or unexpected header");
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 13) throw IoError("results.csv: expected 13 fields, got " + std::to_string(f.size()));
    try {
      ReportRow r;
      r.problem = f[0];
      r.method = f[1];
      r.horizon = parse_number<double>("T", f[2]);
      r.steps = parse_number<int>("N", f[3]);
      r.samples = parse_number<int>("M", f[4]);
      r.seed = parse_number<std::uint64_t>("seed", f[5]);
      r.run = parse_number<int>("run", f[6]);
      r.wall_time_ms = parse_number<double>("wall_time_ms", f[7]);
      r.iterations = parse_number<int>("iterations", f[8]);
      r.converged = f[9] == "1";
      r.residual_inf = f[10] == "inf" ? std::numeric_limits<double>::infinity()
                                      : parse_number<double>("residual_inf", f[10]);
      if (!f[11].empty()) r.cost_mc_mean = parse_number<double>("cost_mc_mean", f[11]);
      if (!f[12].empty()) r.cost_mc_stderr = parse_number<double>("cost_mc_stderr", f[12]);
      rows.push_back(std::move(r));
    } catch (const ConfigError& e) {
      throw IoError(std::string("results.csv: ") + e.what());
    }
  }
  return rows;
}

void emit_report(const ExperimentReport& report, const RunConfig& config,
                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const auto results = dir / "results.csv";
  {
    auto out = open_out(results);
    write_results_csv(report, out);
    check_written(out, results);
  }
  const auto resolved = dir / "config.resolved";
  {
    auto out = open_out(resolved);
    out << config.resolved();
    check_written(out, resolved);
  }
  const auto plot = dir / "plot.py";
  {
    auto out = open_out(plot);
    out << kPlotScript;
    check_written(out, plot);
  }
  if (report.trajectories.empty()) return;

  const auto traj = dir / "trajectories.csv";
  auto out = open_out(traj);
  const TrajectoryRecord& first = report.trajectories.front();
  const int n = first.states.front().dim();
  const int m = first.control.dim();
  out << "run,sample,k,t";
  for (int j = 1; j <= n; ++j) out << ",x_" << j;
  for (int j = 1; j <= n; ++j) out << ",p_" << j;
  for (int j = 1; j <= m; ++j) out << ",u_" << j;
  out << "\n";
  // One method per run: the indirect solution when both are present.
  for (const TrajectoryRecord& rec : report.trajectories) {
    const bool has_indirect = std::any_of(
        report.trajectories.begin(), report.trajectories.end(),
        [&](const TrajectoryRecord& r) { return r.run == rec.run && r.method == "indirect"; });
    if (has_indirect && rec.method != "indirect") continue;
    const TimeGrid& grid = rec.control.grid;
    for (std::size_t i = 0; i < rec.states.size(); ++i) {
      for (int k = 0; k < grid.nodes(); ++k) {
        out << rec.run << ',' << i << ',' << k << ',' << fmt_double(grid.node(k));
        for (int j = 0; j < n; ++j) out << ',' << fmt_double(rec.states[i][k](j));
        for (int j = 0; j < n; ++j)
          out << ',' << (rec.adjoints.empty() ? std::string() : fmt_double(rec.adjoints[i][k](j)));
        for (int j = 0; j < m; ++j)
          out << ',' << (k < grid.steps() ? fmt_double(rec.control[k](j)) : std::string());
        out << "\n";
      }
    }
  }
  check_written(out, traj);
}

}  // namespace roughoc
