#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "roughoc/problem.hpp"
#include "roughoc/rough_path.hpp"

namespace roughoc {

/// Non-finite value produced while stepping. Trajectories are aborted, never clamped.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(int node, int sample, const std::string& what)
      : std::runtime_error(what), node_(node), sample_(sample) {}
  int node() const { return node_; }
  int sample() const { return sample_; }

 private:
  int node_;
  int sample_;
};

/// Second-order rough step
///   x+ = x + b dt + sigma dX + sum_{j,k} D sigma_k(x)[sigma_j(x)] XX^{jk}.
/// Throws StepFailure (node -1) on a non-finite result.
Vec rough_step(const VectorFieldBundle& fields, double t, const Vec& x, const Vec& u,
               const RoughStepInput& inc);

/// Componentwise Milstein step for diagonal diffusion:
///   x_j+ = x_j + b_j dt + s_jj dB_j + 1/2 (d s_jj / d x_j) s_jj dB_j^2.
/// Throws std::invalid_argument if sigma(t, x) has off-diagonal entries.
Vec milstein_step(const VectorFieldBundle& fields, double t, const Vec& x, const Vec& u,
                  double dt, const Vec& dB);

struct StepJacobians {
  Mat wrt_state;    // n x n
  Mat wrt_control;  // n x m
};

/// Analytic Jacobians of rough_step with respect to x and u.
StepJacobians rough_step_jacobians(const VectorFieldBundle& fields, double t, const Vec& x,
                                   const Vec& u, const RoughStepInput& inc);

SampledPath integrate_forward(const VectorFieldBundle& fields, const Vec& x0,
                              const ControlSignal& u, const GridRoughPath& rp);

/// Linearised RDE dV = grad_x b(Y,u) V dt + grad_x sigma(Y) V dX along ref_state.
/// V is held at v0 on [0, t_start] and integrated from node `start` onwards.
SampledPath integrate_linear(const VectorFieldBundle& fields, const SampledPath& ref_state,
                             const ControlSignal& u, const GridRoughPath& rp, const Vec& v0,
                             int start = 0);

/// Fields of the joint (Y, V) system used by integrate_linear.
VectorFieldBundle variational_fields(const VectorFieldBundle& fields);

/// Fields of the augmented state-adjoint system z = (x, p):
///   b_bar = (b, -grad_x H),  sigma_bar_k = (sigma_k, -grad_x sigma_k^T p).
VectorFieldBundle state_adjoint_fields(const OcpProblem& problem);

struct CoupledTrajectories {
  std::vector<SampledPath> states;
  std::vector<SampledPath> adjoints;
  ControlSignal control;
};

/// Marches the M augmented (x^i, p^i) systems in lockstep. At node k the
/// control is resolved from the whole ensemble, then every sample takes one
/// rough step of the augmented field. Throws StepFailure(node, sample).
CoupledTrajectories integrate_coupled(const OcpProblem& problem, const std::vector<Vec>& x0s,
                                      const std::vector<Vec>& p0s,
                                      const std::vector<GridRoughPath>& ensemble);

struct NeedleRatio {
  double eta;
  double ratio;
};

/// Needle-like variation check. For every eta (a multiple of dt) the control
/// is replaced by ubar on [t1, t1 + eta] and the discrepancy
/// max_k |Y^pi_k - Y_k - eta V_k| / eta^2 is taken over nodes k >= t1 + eta.
std::vector<NeedleRatio> needle_variation_check(const VectorFieldBundle& fields, const Vec& x0,
                                                const ControlSignal& u, const GridRoughPath& rp,
                                                int t1, const Vec& ubar,
                                                const std::vector<double>& etas);

/// Discretised constancy of the cost-augmented pairing
///   P_k = p_k . v_k + p0 * v0_k,  v0_{k+1} = v0_k + grad_x f(t_k, x_k, u_k) . v_k dt,
/// returning max_k |P_k - P_0| / (1 + |P_0|).
double pairing_invariant_check(const OcpProblem& problem, const SampledPath& state,
                               const SampledPath& adjoint, const SampledPath& variation,
                               const ControlSignal& u, const GridRoughPath& rp);

}  // namespace roughoc
