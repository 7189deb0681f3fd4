#include "roughoc/validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "roughoc/pvar.hpp"

namespace roughoc {
namespace {

std::string describe(const std::string& what, double value) {
  std::ostringstream out;
  out.precision(6);
  out << what << " = " << value;
  return out.str();
}

Vec normal_vec(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> gauss(0.0, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

}  // namespace

CheckResult check_milstein_identity(std::uint64_t seed, int draws, double tol) {
  const OcpProblem problem = spacecraft_ol(SpacecraftConfig{});
  const VectorFieldBundle aug = state_adjoint_fields(problem);
  const int n = problem.n();
  const double dt = 0.05;
  std::mt19937_64 rng(seed);

  double worst = 0.0;
  for (int draw = 0; draw < draws; ++draw) {
    const Vec x = normal_vec(rng, n, 0.1);
    const Vec p = normal_vec(rng, n, 1.0);
    const Vec u = normal_vec(rng, problem.m(), 0.1);
    const Vec db = normal_vec(rng, n, std::sqrt(dt));

    Vec z(2 * n);
    z << x, p;
    const Vec rough = rough_step(aug, 0.0, z, u, {dt, db, 0.5 * db * db.transpose()});

    // Componentwise Milstein: the state block through milstein_step, the
    // adjoint block (diffusion -d sigma_jj/dx_j p_j, again diagonal) by hand.
    Vec mil(2 * n);
    mil.head(n) = milstein_step(problem.fields, 0.0, x, u, dt, db);
    const Vec pdrift = aug.drift(0.0, z, u).tail(n);
    const Mat sig = aug.diffusion(0.0, z);
    const std::vector<Mat> jac = aug.diffusion_jacobian(0.0, z);
    for (int j = 0; j < n; ++j) {
      const double s = sig(n + j, j);
      const double ds = jac[static_cast<std::size_t>(j)](n + j, n + j);
      mil(n + j) = p(j) + pdrift(j) * dt + s * db(j) + 0.5 * ds * s * db(j) * db(j);
    }
    for (int i = 0; i < 2 * n; ++i) {
      const double scale = std::max({std::abs(z(i)), std::abs(mil(i)), 1e-300});
      worst = std::max(worst, std::abs(rough(i) - mil(i)) / scale);
    }
  }
  return {"milstein-identity", worst <= tol, worst, describe("max relative entry error", worst)};
}

CheckResult check_chen_geometric(std::uint64_t seed, int steps, int dim, int paths, double tol) {
  const TimeGrid grid(0.0, 1.0, steps);
  const auto lifts = lift_ensemble(brownian_sample({paths, dim, seed}, grid));
  double worst = 0.0;
  bool geometric = true;
  for (const auto& rp : lifts) {
    geometric = geometric && check_geometric(rp, tol);
    // table[j][k - j] = second level over [t_j, t_k]
    std::vector<std::vector<Mat>> table(static_cast<std::size_t>(steps + 1));
    for (int j = 0; j <= steps; ++j)
      for (int k = j; k <= steps; ++k)
        table[static_cast<std::size_t>(j)].push_back(k == j ? Mat::Zero(dim, dim)
                                                            : chen_compose(rp, j, k).second);
    for (int j = 0; j <= steps; ++j) {
      for (int u = j; u <= steps; ++u) {
        const Vec xju = increment(rp.base, j, u);
        const Mat& a = table[static_cast<std::size_t>(j)][static_cast<std::size_t>(u - j)];
        for (int k = u; k <= steps; ++k) {
          const Mat& b = table[static_cast<std::size_t>(u)][static_cast<std::size_t>(k - u)];
          const Mat& c = table[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - j)];
          const Mat defect = c - (a + b + xju * increment(rp.base, u, k).transpose());
          worst = std::max(worst, defect.cwiseAbs().maxCoeff());
        }
      }
    }
  }
  const bool ok = geometric && worst <= tol;
  return {"chen-geometric", ok, worst,
          describe("max Chen defect", worst) + (geometric ? "" : "; geometric identity failed")};
}

CheckResult check_needle_ratios(std::uint64_t seed, int steps, int samples, double band) {
  RunConfig config;
  config.problem = "ol";
  config.method = "indirect";
  config.steps = steps;
  config.samples = samples;
  config.master_seed = seed;
  const auto ensemble = solve_ensemble(config, 0);
  const SolveOutcome sol = solve_indirect(config, ensemble);
  if (!sol.control) return {"needle-ratios", false, 0.0, "nominal OL solve did not converge"};

  const OcpProblem problem = build_problem(config);
  const int t1 = steps / 4;
  const Vec ubar = (*sol.control)[t1] + Vec::Constant(problem.m(), 0.1);
  const double dt = ensemble.front().grid().dt();
  const auto ratios = needle_variation_check(problem.fields, problem.x0, *sol.control,
                                             ensemble.front(), t1, ubar, {8 * dt, 4 * dt, 2 * dt});
  double lo = ratios.front().ratio;
  double hi = lo;
  std::ostringstream detail;
  detail.precision(6);
  detail << "ratios";
  for (const auto& r : ratios) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    detail << " " << r.ratio;
  }
  const double spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  detail << "; max/min = " << spread;
  return {"needle-ratios", spread <= band, spread, detail.str()};
}

CheckResult check_pairing_drift(std::uint64_t seed, int steps, double lo, double hi) {
  const OcpProblem problem = spacecraft_ol(SpacecraftConfig{});
  const TimeGrid fine(0.0, problem.horizon, 2 * steps);
  const SampledPath path = brownian_path({1, problem.d(), seed}, fine, 0);
  const Vec p0 = (Vec(3) << 0.5, -0.3, 0.2).finished();
  const Vec v0 = (Vec(3) << 1.0, -1.0, 0.5).finished();

  auto drift = [&](const SampledPath& b) {
    const GridRoughPath rp = stratonovich_lift(b);
    const CoupledTrajectories traj = integrate_coupled(problem, {problem.x0}, {p0}, {rp});
    const SampledPath v = integrate_linear(problem.fields, traj.states[0], traj.control, rp, v0);
    return pairing_invariant_check(problem, traj.states[0], traj.adjoints[0], v, traj.control, rp);
  };
  const double coarse = drift(subsample(path, 2));
  const double refined = drift(path);
  const double ratio = coarse / refined;
  std::ostringstream detail;
  detail.precision(6);
  detail << "drift N=" << steps << ": " << coarse << ", N=" << 2 * steps << ": " << refined
         << ", ratio = " << ratio;
  return {"pairing-drift", ratio >= lo && ratio <= hi, ratio, detail.str()};
}

CheckResult check_greedy_inequality(std::uint64_t seed, int paths, int steps, int dim,
                                    const std::vector<double>& alphas) {
  constexpr double p = 2.5;
  const TimeGrid grid(0.0, 1.0, steps);
  const auto lifts = lift_ensemble(brownian_sample({paths, dim, seed}, grid));
  double worst = 0.0;
  bool ok = true;
  for (const auto& rp : lifts) {
    const double total = control_w(rp, 0, steps, p);
    for (double alpha : alphas) {
      const GreedyPartition part = greedy_partition(rp, alpha, p, 0, steps);
      const double lhs = alpha * part.n_alpha;
      ok = ok && lhs <= total;
      if (total > 0.0) worst = std::max(worst, lhs / total);
    }
  }
  return {"greedy-inequality", ok, worst, describe("max alpha*N_alpha / w(0,T)", worst)};
}

std::vector<CheckResult> run_validation(const RunConfig& config) {
  config.validate();
  auto seed = [&](std::uint64_t i) { return derive_seed(config.master_seed, StreamTag::kValidate, i); };
  return {check_milstein_identity(seed(0)), check_chen_geometric(seed(1)),
          check_needle_ratios(seed(2)), check_pairing_drift(seed(3)),
          check_greedy_inequality(seed(4), 100, 64, 2, config.alphas)};
}

}  // namespace roughoc
