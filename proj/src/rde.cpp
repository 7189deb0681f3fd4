#include "roughoc/rde.hpp"

#include <algorithm>
#include <cmath>

namespace roughoc {

namespace {

Vec contract_second_level(const VectorFieldBundle& fields, double t, const Vec& x, const Mat& w) {
  if (fields.diffusion_contraction) return fields.diffusion_contraction(t, x, w);
  const std::vector<Mat> jac = fields.diffusion_jacobian(t, x);
  Vec out = Vec::Zero(x.size());
  for (int k = 0; k < fields.d; ++k) out += jac[static_cast<std::size_t>(k)] * w.col(k);
  return out;
}

void require_finite(const Vec& v, int node, int sample, const char* what) {
  if (!v.allFinite()) throw StepFailure(node, sample, what);
}

}  // namespace

Vec rough_step(const VectorFieldBundle& fields, double t, const Vec& x, const Vec& u,
               const RoughStepInput& inc) {
  const Mat sig = fields.diffusion(t, x);
  // Column k of sig * XX is sum_j sigma_j XX^{jk}.
  const Mat w = sig * inc.area;
  Vec out = x + fields.drift(t, x, u) * inc.dt + sig * inc.dx +
            contract_second_level(fields, t, x, w);
  require_finite(out, -1, -1, "rough_step: non-finite state");
  return out;
}

Vec milstein_step(const VectorFieldBundle& fields, double t, const Vec& x, const Vec& u,
                  double dt, const Vec& dB) {
  const Mat sig = fields.diffusion(t, x);
  if (sig.rows() != sig.cols() || dB.size() != sig.cols())
    throw std::invalid_argument("milstein_step: diffusion must be square and match dB");
  for (int i = 0; i < sig.rows(); ++i)
    for (int j = 0; j < sig.cols(); ++j)
      if (i != j && sig(i, j) != 0.0)
        throw std::invalid_argument("milstein_step: diffusion is not diagonal");

  const std::vector<Mat> jac = fields.diffusion_jacobian(t, x);
  const Vec b = fields.drift(t, x, u);
  Vec out(x.size());
  for (int j = 0; j < x.size(); ++j) {
    const double s = sig(j, j);
    const double ds = jac[static_cast<std::size_t>(j)](j, j);
    out(j) = x(j) + b(j) * dt + s * dB(j) + 0.5 * ds * s * dB(j) * dB(j);
  }
  require_finite(out, -1, -1, "milstein_step: non-finite state");
  return out;
}

StepJacobians rough_step_jacobians(const VectorFieldBundle& fields, double t, const Vec& x,
                                   const Vec& u, const RoughStepInput& inc) {
  const auto n = x.size();
  const Mat sig = fields.diffusion(t, x);
  const std::vector<Mat> jac = fields.diffusion_jacobian(t, x);
  const Mat w = sig * inc.area;

  Mat dx = Mat::Identity(n, n) + fields.drift_jacobian(t, x, u) * inc.dt;
  for (int k = 0; k < fields.d; ++k) {
    const Mat& jk = jac[static_cast<std::size_t>(k)];
    dx += jk * inc.dx(k);
    // d/dx [J_k(x) w_k(x)] with w_k = sum_j sigma_j XX^{jk}
    Mat dw = Mat::Zero(n, n);
    for (int j = 0; j < fields.d; ++j) dw += jac[static_cast<std::size_t>(j)] * inc.area(j, k);
    dx += jk * dw;
    for (Eigen::Index l = 0; l < n; ++l)
      dx.col(l) += diffusion_hessian_dir(fields, t, x, k, Vec::Unit(n, l)) * w.col(k);
  }
  return {std::move(dx), fields.drift_control_jacobian(t, x, u) * inc.dt};
}

SampledPath integrate_forward(const VectorFieldBundle& fields, const Vec& x0,
                              const ControlSignal& u, const GridRoughPath& rp) {
  if (!(u.grid == rp.grid())) throw std::invalid_argument("integrate_forward: grid mismatch");
  const TimeGrid& grid = rp.grid();
  std::vector<Vec> values;
  values.reserve(static_cast<std::size_t>(grid.nodes()));
  values.push_back(x0);
  for (int k = 0; k < grid.steps(); ++k) {
    try {
      values.push_back(rough_step(fields, grid.node(k), values.back(), u[k], step_input(rp, k)));
    } catch (const StepFailure& e) {
      throw StepFailure(k, -1, std::string("integrate_forward: ") + e.what() + " at node " +
                                   std::to_string(k));
    }
  }
  return SampledPath(grid, std::move(values));
}

VectorFieldBundle variational_fields(const VectorFieldBundle& fields) {
  const int n = fields.n;
  VectorFieldBundle joint;
  joint.n = 2 * n;
  joint.m = fields.m;
  joint.d = fields.d;

  joint.drift = [fields, n](double t, const Vec& z, const Vec& u) {
    const Vec y = z.head(n);
    Vec out(2 * n);
    out.head(n) = fields.drift(t, y, u);
    out.tail(n) = fields.drift_jacobian(t, y, u) * z.tail(n);
    return out;
  };
  joint.diffusion = [fields, n](double t, const Vec& z) {
    const Vec y = z.head(n);
    const Vec v = z.tail(n);
    const std::vector<Mat> jac = fields.diffusion_jacobian(t, y);
    Mat out(2 * n, fields.d);
    out.topRows(n) = fields.diffusion(t, y);
    for (int k = 0; k < fields.d; ++k) out.block(n, k, n, 1) = jac[static_cast<std::size_t>(k)] * v;
    return out;
  };
  joint.diffusion_jacobian = [fields, n](double t, const Vec& z) {
    const Vec y = z.head(n);
    const Vec v = z.tail(n);
    const std::vector<Mat> jac = fields.diffusion_jacobian(t, y);
    std::vector<Mat> out;
    for (int k = 0; k < fields.d; ++k) {
      const Mat& jk = jac[static_cast<std::size_t>(k)];
      Mat m = Mat::Zero(2 * n, 2 * n);
      m.topLeftCorner(n, n) = jk;
      m.bottomRightCorner(n, n) = jk;
      for (int l = 0; l < n; ++l)
        m.block(n, l, n, 1) = diffusion_hessian_dir(fields, t, y, k, Vec::Unit(n, l)) * v;
      out.push_back(std::move(m));
    }
    return out;
  };
  joint.diffusion_contraction = [fields, n](double t, const Vec& z, const Mat& w) {
    const Vec y = z.head(n);
    const Vec v = z.tail(n);
    const std::vector<Mat> jac = fields.diffusion_jacobian(t, y);
    Vec out = Vec::Zero(2 * n);
    for (int k = 0; k < fields.d; ++k) {
      const Mat& jk = jac[static_cast<std::size_t>(k)];
      const Vec wy = w.block(0, k, n, 1);
      const Vec wv = w.block(n, k, n, 1);
      out.head(n) += jk * wy;
      out.tail(n) += diffusion_hessian_dir(fields, t, y, k, wy) * v + jk * wv;
    }
    return out;
  };
  return joint;
}

SampledPath integrate_linear(const VectorFieldBundle& fields, const SampledPath& ref_state,
                             const ControlSignal& u, const GridRoughPath& rp, const Vec& v0,
                             int start) {
  if (!(ref_state.grid == rp.grid()) || !(u.grid == rp.grid()))
    throw std::invalid_argument("integrate_linear: grid mismatch");
  const TimeGrid& grid = rp.grid();
  if (start < 0 || start > grid.steps())
    throw std::out_of_range("integrate_linear: start node out of range");
  const int n = fields.n;
  const VectorFieldBundle joint = variational_fields(fields);

  std::vector<Vec> values(static_cast<std::size_t>(start + 1), v0);
  values.reserve(static_cast<std::size_t>(grid.nodes()));
  Vec z(2 * n);
  for (int k = start; k < grid.steps(); ++k) {
    z.head(n) = ref_state[k];
    z.tail(n) = values.back();
    try {
      const Vec next = rough_step(joint, grid.node(k), z, u[k], step_input(rp, k));
      values.push_back(next.tail(n));
    } catch (const StepFailure& e) {
      throw StepFailure(k, -1, std::string("integrate_linear: ") + e.what() + " at node " +
                                   std::to_string(k));
    }
  }
  return SampledPath(grid, std::move(values));
}

VectorFieldBundle state_adjoint_fields(const OcpProblem& problem) {
  const int n = problem.n();
  const VectorFieldBundle& f = problem.fields;
  VectorFieldBundle aug;
  aug.n = 2 * n;
  aug.m = f.m;
  aug.d = f.d;

  aug.drift = [problem, n](double t, const Vec& z, const Vec& u) {
    const Vec x = z.head(n);
    const Vec p = z.tail(n);
    Vec out(2 * n);
    out.head(n) = problem.fields.drift(t, x, u);
    out.tail(n) = -hamiltonian_grad_x(problem, t, x, u, p, problem.p0);
    return out;
  };
  aug.diffusion = [f, n](double t, const Vec& z) {
    const Vec x = z.head(n);
    const Vec p = z.tail(n);
    const std::vector<Mat> jac = f.diffusion_jacobian(t, x);
    Mat out(2 * n, f.d);
    out.topRows(n) = f.diffusion(t, x);
    for (int k = 0; k < f.d; ++k)
      out.block(n, k, n, 1) = -jac[static_cast<std::size_t>(k)].transpose() * p;
    return out;
  };
  aug.diffusion_jacobian = [f, n](double t, const Vec& z) {
    const Vec x = z.head(n);
    const Vec p = z.tail(n);
    const std::vector<Mat> jac = f.diffusion_jacobian(t, x);
    std::vector<Mat> out;
    for (int k = 0; k < f.d; ++k) {
      const Mat& jk = jac[static_cast<std::size_t>(k)];
      Mat m = Mat::Zero(2 * n, 2 * n);
      m.topLeftCorner(n, n) = jk;
      m.bottomRightCorner(n, n) = -jk.transpose();
      for (int l = 0; l < n; ++l)
        m.block(n, l, n, 1) =
            -diffusion_hessian_dir(f, t, x, k, Vec::Unit(n, l)).transpose() * p;
      out.push_back(std::move(m));
    }
    return out;
  };
  aug.diffusion_contraction = [f, n](double t, const Vec& z, const Mat& w) {
    const Vec x = z.head(n);
    const Vec p = z.tail(n);
    const std::vector<Mat> jac = f.diffusion_jacobian(t, x);
    Vec out = Vec::Zero(2 * n);
    for (int k = 0; k < f.d; ++k) {
      const Mat& jk = jac[static_cast<std::size_t>(k)];
      const Vec wx = w.block(0, k, n, 1);
      const Vec wp = w.block(n, k, n, 1);
      out.head(n) += jk * wx;
      out.tail(n) -= diffusion_hessian_dir(f, t, x, k, wx).transpose() * p + jk.transpose() * wp;
    }
    return out;
  };
  return aug;
}

CoupledTrajectories integrate_coupled(const OcpProblem& problem, const std::vector<Vec>& x0s,
                                      const std::vector<Vec>& p0s,
                                      const std::vector<GridRoughPath>& ensemble) {
  const std::size_t samples = ensemble.size();
  if (samples == 0 || x0s.size() != samples || p0s.size() != samples)
    throw std::invalid_argument("integrate_coupled: x0s, p0s and ensemble sizes must agree");
  if (!problem.resolver) throw std::invalid_argument("integrate_coupled: problem has no resolver");
  const TimeGrid& grid = ensemble.front().grid();
  for (const auto& rp : ensemble)
    if (!(rp.grid() == grid)) throw std::invalid_argument("integrate_coupled: grid mismatch");

  const int n = problem.n();
  const VectorFieldBundle aug = state_adjoint_fields(problem);

  std::vector<std::vector<Vec>> xs(samples);
  std::vector<std::vector<Vec>> ps(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    xs[i].reserve(static_cast<std::size_t>(grid.nodes()));
    ps[i].reserve(static_cast<std::size_t>(grid.nodes()));
    xs[i].push_back(x0s[i]);
    ps[i].push_back(p0s[i]);
  }
  std::vector<Vec> controls;
  controls.reserve(static_cast<std::size_t>(grid.steps()));

  std::vector<Vec> x_now(samples);
  std::vector<Vec> p_now(samples);
  Vec z(2 * n);
  for (int k = 0; k < grid.steps(); ++k) {
    const double t = grid.node(k);
    for (std::size_t i = 0; i < samples; ++i) {
      x_now[i] = xs[i].back();
      p_now[i] = ps[i].back();
    }
    Vec u = problem.resolver(t, x_now, p_now, problem.p0);
    if (!u.allFinite())
      throw StepFailure(k, -1, "integrate_coupled: non-finite control at node " + std::to_string(k));

    for (std::size_t i = 0; i < samples; ++i) {
      z.head(n) = x_now[i];
      z.tail(n) = p_now[i];
      Vec next;
      try {
        next = rough_step(aug, t, z, u, step_input(ensemble[i], k));
      } catch (const StepFailure&) {
        throw StepFailure(k, static_cast<int>(i),
                          "integrate_coupled: non-finite state at node " + std::to_string(k) +
                              ", sample " + std::to_string(i));
      }
      xs[i].push_back(next.head(n));
      ps[i].push_back(next.tail(n));
    }
    controls.push_back(std::move(u));
  }

  CoupledTrajectories out{{}, {}, ControlSignal(grid, std::move(controls))};
  out.states.reserve(samples);
  out.adjoints.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    out.states.emplace_back(grid, std::move(xs[i]));
    out.adjoints.emplace_back(grid, std::move(ps[i]));
  }
  return out;
}

std::vector<NeedleRatio> needle_variation_check(const VectorFieldBundle& fields, const Vec& x0,
                                                const ControlSignal& u, const GridRoughPath& rp,
                                                int t1, const Vec& ubar,
                                                const std::vector<double>& etas) {
  const TimeGrid& grid = rp.grid();
  if (t1 <= 0 || t1 >= grid.steps())
    throw std::out_of_range("needle_variation_check: t1 must be an interior node");

  const SampledPath nominal = integrate_forward(fields, x0, u, rp);
  const double t1_time = grid.node(t1);
  const Vec v0 = fields.drift(t1_time, nominal[t1], ubar) - fields.drift(t1_time, nominal[t1], u[t1]);
  const SampledPath variation = integrate_linear(fields, nominal, u, rp, v0, t1);

  std::vector<NeedleRatio> out;
  for (double eta : etas) {
    const double steps_real = eta / grid.dt();
    const int steps = static_cast<int>(std::lround(steps_real));
    if (steps < 1 || std::abs(steps_real - steps) > 1e-9 * std::max(1.0, steps_real))
      throw std::invalid_argument("needle_variation_check: eta is not a multiple of dt");
    if (t1 + steps > grid.steps())
      throw std::invalid_argument("needle_variation_check: eta window exceeds the horizon");

    std::vector<Vec> perturbed = u.values;
    for (int k = t1; k < t1 + steps; ++k) perturbed[static_cast<std::size_t>(k)] = ubar;
    const SampledPath varied =
        integrate_forward(fields, x0, ControlSignal(grid, std::move(perturbed)), rp);

    double worst = 0.0;
    for (int k = t1 + steps; k <= grid.steps(); ++k)
      worst = std::max(worst, (varied[k] - nominal[k] - eta * variation[k]).norm());
    out.push_back({eta, worst / (eta * eta)});
  }
  return out;
}

double pairing_invariant_check(const OcpProblem& problem, const SampledPath& state,
                               const SampledPath& adjoint, const SampledPath& variation,
                               const ControlSignal& u, const GridRoughPath& rp) {
  const TimeGrid& grid = rp.grid();
  if (!(state.grid == grid) || !(adjoint.grid == grid) || !(variation.grid == grid) ||
      !(u.grid == grid))
    throw std::invalid_argument("pairing_invariant_check: grid mismatch");

  double cost_variation = 0.0;
  const double initial = adjoint[0].dot(variation[0]);
  double worst = 0.0;
  for (int k = 1; k <= grid.steps(); ++k) {
    const double t_prev = grid.node(k - 1);
    cost_variation +=
        problem.running_cost_grad_x(t_prev, state[k - 1], u[k - 1]).dot(variation[k - 1]) *
        grid.dt();
    const double pairing = adjoint[k].dot(variation[k]) + problem.p0 * cost_variation;
    worst = std::max(worst, std::abs(pairing - initial));
  }
  return worst / (1.0 + std::abs(initial));
}

}  // namespace roughoc
