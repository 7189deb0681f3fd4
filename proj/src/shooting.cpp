#include "roughoc/shooting.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace roughoc {

std::vector<Vec> ShootingUnknowns::split(int n) const {
  const auto samples = p0s.size() / n;
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (Eigen::Index i = 0; i < samples; ++i) out.push_back(p0s.segment(i * n, n));
  return out;
}

Vec shooting_map(const OcpProblem& problem, const ShootingUnknowns& unknowns,
                 const std::vector<GridRoughPath>& ensemble, const std::vector<Vec>& x0s) {
  const int n = problem.n();
  if (unknowns.p0s.size() != static_cast<Eigen::Index>(ensemble.size()) * n)
    throw std::invalid_argument("shooting_map: unknowns must have M*n entries");
  const CoupledTrajectories traj =
      integrate_coupled(problem, x0s, unknowns.split(n), ensemble);
  const int last = ensemble.front().steps();
  Vec residual(unknowns.p0s.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const Vec& x_final = traj.states[i][last];
    residual.segment(static_cast<Eigen::Index>(i) * n, n) =
        traj.adjoints[i][last] - problem.p0 * problem.terminal_cost_grad(x_final);
  }
  return residual;
}

Mat numeric_jacobian(const ResidualMap& map, const Vec& z, double fd_step) {
  Mat jac;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double h = fd_step * (1.0 + std::abs(z(j)));
    Vec zp = z;
    Vec zm = z;
    zp(j) += h;
    zm(j) -= h;
    const Vec fp = map(zp);
    const Vec fm = map(zm);
    if (!fp.allFinite() || !fm.allFinite())
      throw std::runtime_error("numeric_jacobian: non-finite residual at probe " +
                               std::to_string(j));
    if (jac.size() == 0) jac.resize(fp.size(), z.size());
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

NewtonResult newton_root(const ResidualMap& map, const Vec& init, const NewtonOptions& opts) {
  if (!(opts.tolerance > 0.0)) throw std::invalid_argument("newton_root: tolerance must be > 0");
  const auto start = std::chrono::steady_clock::now();
  NewtonResult out{init, {}};
  NewtonReport& rep = out.report;
  auto finish = [&]() {
    rep.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
  };

  Vec& z = out.solution;
  for (int iter = 0;; ++iter) {
    Vec residual;
    try {
      residual = map(z);
    } catch (const std::exception& e) {
      rep.failure = std::string("residual evaluation failed: ") + e.what();
      rep.residual_inf = std::numeric_limits<double>::infinity();
      return finish();
    }
    if (!residual.allFinite()) {
      rep.failure = "non-finite residual";
      rep.residual_inf = std::numeric_limits<double>::infinity();
      return finish();
    }
    rep.residual_inf = residual.lpNorm<Eigen::Infinity>();
    rep.history.push_back(rep.residual_inf);
    rep.iterations = iter;
    if (rep.residual_inf < opts.tolerance) {
      rep.converged = true;
      return finish();
    }
    if (iter >= opts.max_iters) {
      rep.failure = "max iterations reached";
      return finish();
    }

    Mat jac;
    try {
      jac = numeric_jacobian(map, z, opts.fd_step);
    } catch (const std::exception& e) {
      rep.failure = std::string("jacobian evaluation failed: ") + e.what();
      return finish();
    }
    const Eigen::PartialPivLU<Mat> lu(jac);
    if (!(lu.rcond() > 1e-15)) {
      rep.failure = "singular jacobian";
      return finish();
    }
    const Vec step = lu.solve(residual);
    if (!step.allFinite()) {
      rep.failure = "non-finite newton step";
      return finish();
    }
    z -= step;
  }
}

ShootingResult newton_solve(const OcpProblem& problem, const std::vector<GridRoughPath>& ensemble,
                            const std::vector<Vec>& x0s, const ShootingUnknowns& init,
                            const NewtonOptions& opts) {
  const ResidualMap map = [&](const Vec& z) {
    return shooting_map(problem, ShootingUnknowns{z}, ensemble, x0s);
  };
  NewtonResult res = newton_root(map, init.p0s, opts);
  return {ShootingUnknowns{std::move(res.solution)}, std::move(res.report)};
}

HomotopyResult homotopy_solve(const std::function<OcpProblem(double)>& family,
                              const std::vector<double>& schedule,
                              const std::vector<GridRoughPath>& ensemble,
                              const std::vector<Vec>& x0s, const NewtonOptions& opts,
                              std::optional<ShootingUnknowns> init) {
  if (schedule.empty()) throw std::invalid_argument("homotopy_solve: empty schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i] < schedule[i - 1]))
      throw std::invalid_argument("homotopy_solve: schedule must be strictly decreasing");

  HomotopyResult out;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const OcpProblem problem = family(schedule[i]);
    ShootingUnknowns guess;
    if (i > 0) {
      guess = out.steps.back().unknowns;
    } else if (init) {
      guess = *init;
    } else {
      guess = ShootingUnknowns::zeros(static_cast<int>(ensemble.size()), problem.n());
    }
    ShootingResult res = newton_solve(problem, ensemble, x0s, guess, opts);
    const bool ok = res.report.converged;
    out.steps.push_back({schedule[i], std::move(res.unknowns), std::move(res.report)});
    if (!ok) {
      out.first_step_failed = (i == 0);
      return out;
    }
  }
  out.completed = true;
  return out;
}

}  // namespace roughoc
