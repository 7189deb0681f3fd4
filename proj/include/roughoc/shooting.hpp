#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "roughoc/ocp.hpp"

namespace roughoc {

/// Stacked adjoint initial values (p_0^1, ..., p_0^M), length M*n.
struct ShootingUnknowns {
  Vec p0s;

  static ShootingUnknowns zeros(int samples, int n) { return {Vec::Zero(samples * n)}; }
  std::vector<Vec> split(int n) const;
};

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  double residual_inf = 0.0;
  double wall_time_ms = 0.0;
  std::vector<double> history;
  std::string failure;  // empty unless the solver stopped early
};

struct NewtonOptions {
  double tolerance = 1e-6;
  int max_iters = 50;
  double fd_step = 1e-6;
};

using ResidualMap = std::function<Vec(const Vec&)>;

/// Residual of the shooting system: p_N^i - p0 * grad g(x_N^i), stacked.
/// Throws StepFailure when the coupled integration fails.
Vec shooting_map(const OcpProblem& problem, const ShootingUnknowns& unknowns,
                 const std::vector<GridRoughPath>& ensemble, const std::vector<Vec>& x0s);

/// Central-difference Jacobian, column j probed with h = fd_step * (1 + |z_j|).
/// Throws std::runtime_error on a non-finite probe.
Mat numeric_jacobian(const ResidualMap& map, const Vec& z, double fd_step);

struct NewtonResult {
  Vec solution;
  NewtonReport report;
};

/// Full-step Newton z+ = z - J(z)^{-1} F(z) with dense partial-pivot LU.
/// Never throws for solver failures; they are reported instead.
NewtonResult newton_root(const ResidualMap& map, const Vec& init, const NewtonOptions& opts);

struct ShootingResult {
  ShootingUnknowns unknowns;
  NewtonReport report;
};

ShootingResult newton_solve(const OcpProblem& problem, const std::vector<GridRoughPath>& ensemble,
                            const std::vector<Vec>& x0s, const ShootingUnknowns& init,
                            const NewtonOptions& opts);

struct HomotopyStep {
  double parameter;
  ShootingUnknowns unknowns;
  NewtonReport report;
};

struct HomotopyResult {
  std::vector<HomotopyStep> steps;
  bool completed = false;
  bool first_step_failed = false;
};

/// Solves family(R) along a strictly decreasing schedule, warm starting each
/// solve from the previous solution. The first solve starts from `init`
/// (zero when empty). Stops at the first non-converged solve.
HomotopyResult homotopy_solve(const std::function<OcpProblem(double)>& family,
                              const std::vector<double>& schedule,
                              const std::vector<GridRoughPath>& ensemble,
                              const std::vector<Vec>& x0s, const NewtonOptions& opts,
                              std::optional<ShootingUnknowns> init = std::nullopt);

}  // namespace roughoc
