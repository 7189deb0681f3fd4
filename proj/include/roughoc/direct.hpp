#pragma once

#include <Eigen/Sparse>

#include "roughoc/ocp.hpp"
#include "roughoc/shooting.hpp"

namespace roughoc {

using SparseMat = Eigen::SparseMatrix<double>;

/// Unpacked decision vector: N controls and M state trajectories.
struct DecisionVector {
  ControlSignal control;
  std::vector<SampledPath> states;
};

/// Full transcription of the sampled problem.
///
/// Layout of z: controls first, u_k at [k*m, (k+1)*m) for k = 0..N-1, then
/// x^i_k at N*m + (i*(N+1) + k)*n. Constraint rows follow the state layout:
/// row block (i, 0) is x^i_0 - x0^i, row block (i, k>0) is
/// x^i_k - step(x^i_{k-1}, u_{k-1}, dB^i_{k-1}).
class Transcription {
 public:
  Transcription(const OcpProblem& problem, const std::vector<GridRoughPath>& ensemble,
                const std::vector<Vec>& x0s);

  int num_vars() const { return num_vars_; }
  int num_constraints() const { return num_constraints_; }
  int control_index(int k) const { return k * m_; }
  int state_index(int sample, int k) const { return steps_ * m_ + (sample * (steps_ + 1) + k) * n_; }
  const TimeGrid& grid() const { return grid_; }

  /// (1/M) sum_i [ sum_k f(t_k, x^i_k, u_k) dt + g(x^i_N) ].
  double cost(const Vec& z) const;
  Vec cost_gradient(const Vec& z) const;
  /// Hessian of the running cost only; the terminal cost contributes none.
  SparseMat cost_hessian(const Vec& z) const;

  Vec constraints(const Vec& z) const;
  SparseMat constraint_jacobian(const Vec& z) const;

  Vec pack(const ControlSignal& control, const std::vector<SampledPath>& states) const;
  DecisionVector unpack(const Vec& z) const;

  /// z from forward simulation of every sample under `control`.
  Vec rollout(const ControlSignal& control) const;

 private:
  const OcpProblem& problem_;
  const std::vector<GridRoughPath>& ensemble_;
  std::vector<Vec> x0s_;
  TimeGrid grid_;
  int n_;
  int m_;
  int samples_;
  int steps_;
  int num_vars_;
  int num_constraints_;
};

struct SqpOptions {
  double tolerance = 1e-6;
  int max_iters = 100;
};

struct SqpResult {
  Vec solution;
  Vec multipliers;
  NewtonReport report;  // residual_inf holds |dz|_inf of the last step
};

/// Full-step SQP: each iteration solves the equality-constrained QP
///   min 1/2 dz^T H dz + g^T dz  s.t.  A dz + c = 0
/// through the sparse KKT system [[H, A^T], [A, 0]]. Stops when |dz|_inf < tol.
/// The step that meets the tolerance is applied but not counted in
/// report.iterations, so an exact QP reports one iteration.
SqpResult sqp_solve(const Transcription& problem, const Vec& z0, const SqpOptions& opts);

}  // namespace roughoc
