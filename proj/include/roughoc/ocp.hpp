#pragma once

#include "roughoc/problem.hpp"
#include "roughoc/rde.hpp"

namespace roughoc {

/// Rigid-body angular velocity regulation data.
struct SpacecraftConfig {
  Vec inertia = (Vec(3) << 3.0, 2.0, 4.0).finished();  // J = diag(inertia)
  double noise_scale = 0.4;                             // sigma(x) = noise_scale * diag(x)
  double state_weight = 10.0;                           // Q = state_weight * I
  double control_weight = 3.0;                          // R = control_weight * I
  Vec x0 = (Vec(3) << -1.0, -4.5, 4.5).finished() * (3.14159265358979323846 / 180.0);
  double horizon = 2.0;

  void validate() const;
};

/// Cross-product matrix: S(x) y = x x y.
Mat cross_matrix(const Vec& x);

/// Open-loop problem: b = A(x)x + J^{-1}u with A(x) = -J^{-1} S(x) J,
/// f = 1/2 (x^T Q x + u^T R u), g = 0, resolver u = R^{-1} J^{-T} mean(p).
OcpProblem spacecraft_ol(const SpacecraftConfig& config);

/// Feedback problem over diagonal gains k: b = (A(x) + J^{-1} diag(k)) x,
/// f = 1/2 (x^T Q x + x^T diag(k) R diag(k) x). The resolver sets
/// k_j = mean(p_j x_j) / (J_j R_j mean(x_j^2)), or 0 (with a warning on stderr)
/// when mean(x_j^2) < 1e-12.
OcpProblem spacecraft_fb(const SpacecraftConfig& config);

/// Deterministic scalar LQR: b = a x + u (a = -0.5), sigma = 0,
/// f = 1/2 (q x^2 + r u^2) with q = r = 1, T = 1, x0 = 1.
OcpProblem scalar_lqr_test(double x0 = 1.0);

/// Problem lookup by CLI name: "ol", "fb" or "lqr".
OcpProblem make_problem(const std::string& name, const SpacecraftConfig& config);

struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> samples;
};

/// Left-endpoint cost sum_k f(t_k, x_k, u_k) dt + g(x_N) of one trajectory.
double trajectory_cost(const OcpProblem& problem, const SampledPath& state,
                       const ControlSignal& control);

/// Monte-Carlo cost of a fixed control (or gain) signal on fresh paths drawn
/// from `eval`, integrated with the rough step from problem.x0.
CostEstimate evaluate_cost_mc(const OcpProblem& problem, const ControlSignal& control,
                              const EnsembleSpec& eval);

/// Stratonovich lifts of an ensemble.
std::vector<GridRoughPath> lift_ensemble(const std::vector<SampledPath>& paths);

}  // namespace roughoc
