#include "roughoc/ocp.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace roughoc {

void SpacecraftConfig::validate() const {
  if (inertia.size() != 3 || (inertia.array() <= 0.0).any())
    throw std::invalid_argument("SpacecraftConfig: inertia must be 3 positive entries");
  if (x0.size() != 3) throw std::invalid_argument("SpacecraftConfig: x0 must have 3 entries");
  if (!(state_weight > 0.0) || !(control_weight > 0.0))
    throw std::invalid_argument("SpacecraftConfig: Q and R must be positive definite");
  if (!(horizon > 0.0)) throw std::invalid_argument("SpacecraftConfig: horizon must be positive");
}

Mat cross_matrix(const Vec& x) {
  Mat s(3, 3);
  s << 0.0, -x(2), x(1),
       x(2), 0.0, -x(0),
       -x(1), x(0), 0.0;
  return s;
}

namespace {

struct RigidBody {
  Vec inertia;
  Vec inv_inertia;

  // A(x) x = -J^{-1} (x x Jx)
  Vec gyroscopic(const Vec& x) const {
    const Vec jx = inertia.cwiseProduct(x);
    return -inv_inertia.cwiseProduct(cross_matrix(x) * jx);
  }
  // d/dx of A(x) x = -J^{-1} (S(x) J - S(Jx))
  Mat gyroscopic_jacobian(const Vec& x) const {
    const Mat sj = cross_matrix(x) * inertia.asDiagonal();
    return -(inv_inertia.asDiagonal() * (sj - cross_matrix(inertia.cwiseProduct(x))));
  }
};

void set_diagonal_diffusion(VectorFieldBundle& fields, double c) {
  fields.diffusion = [c](double, const Vec& x) -> Mat { return c * x.asDiagonal().toDenseMatrix(); };
  fields.diffusion_jacobian = [c](double, const Vec& x) {
    std::vector<Mat> out;
    const auto n = x.size();
    for (Eigen::Index k = 0; k < n; ++k) {
      Mat m = Mat::Zero(n, n);
      m(k, k) = c;
      out.push_back(std::move(m));
    }
    return out;
  };
  fields.diffusion_hessian = [](double, const Vec& x, int, const Vec&) -> Mat {
    return Mat::Zero(x.size(), x.size());
  };
  fields.diffusion_contraction = [c](double, const Vec& x, const Mat& w) -> Vec {
    return c * w.diagonal().head(x.size());
  };
}

Vec mean_of(std::span<const Vec> vs) {
  Vec acc = Vec::Zero(vs.front().size());
  for (const Vec& v : vs) acc += v;
  return acc / static_cast<double>(vs.size());
}

}  // namespace

OcpProblem spacecraft_ol(const SpacecraftConfig& config) {
  config.validate();
  const RigidBody body{config.inertia, config.inertia.cwiseInverse()};
  const double q = config.state_weight;
  const double r = config.control_weight;

  OcpProblem p;
  p.name = "ol";
  p.horizon = config.horizon;
  p.x0 = config.x0;
  VectorFieldBundle& f = p.fields;
  f.n = f.m = f.d = 3;
  f.drift = [body](double, const Vec& x, const Vec& u) -> Vec {
    return body.gyroscopic(x) + body.inv_inertia.cwiseProduct(u);
  };
  f.drift_jacobian = [body](double, const Vec& x, const Vec&) -> Mat {
    return body.gyroscopic_jacobian(x);
  };
  f.drift_control_jacobian = [body](double, const Vec&, const Vec&) -> Mat {
    return body.inv_inertia.asDiagonal().toDenseMatrix();
  };
  set_diagonal_diffusion(f, config.noise_scale);

  p.running_cost = [q, r](double, const Vec& x, const Vec& u) {
    return 0.5 * (q * x.squaredNorm() + r * u.squaredNorm());
  };
  p.running_cost_grad_x = [q](double, const Vec& x, const Vec&) -> Vec { return q * x; };
  p.running_cost_grad_u = [r](double, const Vec&, const Vec& u) -> Vec { return r * u; };
  p.running_cost_hessian = [q, r](double, const Vec&, const Vec&) -> Mat {
    Vec diag(6);
    diag << q, q, q, r, r, r;
    return diag.asDiagonal().toDenseMatrix();
  };
  p.terminal_cost = [](const Vec&) { return 0.0; };
  p.terminal_cost_grad = [](const Vec& x) -> Vec { return Vec::Zero(x.size()); };
  p.resolver = [body, r](double, std::span<const Vec>, std::span<const Vec> ps, double) -> Vec {
    return body.inv_inertia.cwiseProduct(mean_of(ps)) / r;
  };
  return p;
}

OcpProblem spacecraft_fb(const SpacecraftConfig& config) {
  config.validate();
  const RigidBody body{config.inertia, config.inertia.cwiseInverse()};
  const double q = config.state_weight;
  const double r = config.control_weight;

  OcpProblem p;
  p.name = "fb";
  p.horizon = config.horizon;
  p.x0 = config.x0;
  VectorFieldBundle& f = p.fields;
  f.n = f.m = f.d = 3;
  f.drift = [body](double, const Vec& x, const Vec& k) -> Vec {
    return body.gyroscopic(x) + body.inv_inertia.cwiseProduct(k).cwiseProduct(x);
  };
  f.drift_jacobian = [body](double, const Vec& x, const Vec& k) -> Mat {
    Mat jac = body.gyroscopic_jacobian(x);
    jac.diagonal() += body.inv_inertia.cwiseProduct(k);
    return jac;
  };
  f.drift_control_jacobian = [body](double, const Vec& x, const Vec&) -> Mat {
    return body.inv_inertia.cwiseProduct(x).asDiagonal().toDenseMatrix();
  };
  set_diagonal_diffusion(f, config.noise_scale);

  p.running_cost = [q, r](double, const Vec& x, const Vec& k) {
    return 0.5 * (q * x.squaredNorm() + r * k.cwiseProduct(x).squaredNorm());
  };
  p.running_cost_grad_x = [q, r](double, const Vec& x, const Vec& k) -> Vec {
    return q * x + r * k.cwiseProduct(k).cwiseProduct(x);
  };
  p.running_cost_grad_u = [r](double, const Vec& x, const Vec& k) -> Vec {
    return r * x.cwiseProduct(x).cwiseProduct(k);
  };
  p.running_cost_hessian = [q, r](double, const Vec& x, const Vec& k) -> Mat {
    Mat h = Mat::Zero(6, 6);
    for (int j = 0; j < 3; ++j) {
      h(j, j) = q + r * k(j) * k(j);
      h(3 + j, 3 + j) = r * x(j) * x(j);
      h(j, 3 + j) = h(3 + j, j) = 2.0 * r * k(j) * x(j);
    }
    return h;
  };
  p.terminal_cost = [](const Vec&) { return 0.0; };
  p.terminal_cost_grad = [](const Vec& x) -> Vec { return Vec::Zero(x.size()); };
  p.resolver = [body, r](double t, std::span<const Vec> xs, std::span<const Vec> ps,
                         double) -> Vec {
    Vec num = Vec::Zero(3);
    Vec den = Vec::Zero(3);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      num += ps[i].cwiseProduct(xs[i]);
      den += xs[i].cwiseProduct(xs[i]);
    }
    num /= static_cast<double>(xs.size());
    den /= static_cast<double>(xs.size());
    Vec k(3);
    for (int j = 0; j < 3; ++j) {
      if (den(j) < 1e-12) {
        std::cerr << "warning: feedback resolver guard hit at t=" << t << ", component " << j
                  << "; gain set to 0\n";
        k(j) = 0.0;
      } else {
        k(j) = num(j) / (body.inertia(j) * r * den(j));
      }
    }
    return k;
  };
  return p;
}

OcpProblem scalar_lqr_test(double x0) {
  static constexpr double a = -0.5;
  static constexpr double q = 1.0;
  static constexpr double r = 1.0;

  OcpProblem p;
  p.name = "lqr";
  p.horizon = 1.0;
  p.x0 = Vec::Constant(1, x0);
  VectorFieldBundle& f = p.fields;
  f.n = f.m = f.d = 1;
  f.drift = [](double, const Vec& x, const Vec& u) -> Vec { return a * x + u; };
  f.drift_jacobian = [](double, const Vec&, const Vec&) -> Mat { return Mat::Constant(1, 1, a); };
  f.drift_control_jacobian = [](double, const Vec&, const Vec&) -> Mat {
    return Mat::Identity(1, 1);
  };
  f.diffusion = [](double, const Vec&) -> Mat { return Mat::Zero(1, 1); };
  f.diffusion_jacobian = [](double, const Vec&) { return std::vector<Mat>{Mat::Zero(1, 1)}; };
  f.diffusion_hessian = [](double, const Vec&, int, const Vec&) -> Mat { return Mat::Zero(1, 1); };

  p.running_cost = [](double, const Vec& x, const Vec& u) {
    return 0.5 * (q * x.squaredNorm() + r * u.squaredNorm());
  };
  p.running_cost_grad_x = [](double, const Vec& x, const Vec&) -> Vec { return q * x; };
  p.running_cost_grad_u = [](double, const Vec&, const Vec& u) -> Vec { return r * u; };
  p.running_cost_hessian = [](double, const Vec&, const Vec&) -> Mat {
    Mat h(2, 2);
    h << q, 0.0, 0.0, r;
    return h;
  };
  p.terminal_cost = [](const Vec&) { return 0.0; };
  p.terminal_cost_grad = [](const Vec& x) -> Vec { return Vec::Zero(x.size()); };
  p.resolver = [](double, std::span<const Vec>, std::span<const Vec> ps, double) -> Vec {
    return mean_of(ps) / r;
  };
  return p;
}

OcpProblem make_problem(const std::string& name, const SpacecraftConfig& config) {
  if (name == "ol") return spacecraft_ol(config);
  if (name == "fb") return spacecraft_fb(config);
  if (name == "lqr") return scalar_lqr_test();
  throw std::invalid_argument("unknown problem '" + name + "' (expected ol, fb or lqr)");
}

std::vector<GridRoughPath> lift_ensemble(const std::vector<SampledPath>& paths) {
  std::vector<GridRoughPath> out;
  out.reserve(paths.size());
  for (const auto& path : paths) out.push_back(stratonovich_lift(path));
  return out;
}

double trajectory_cost(const OcpProblem& problem, const SampledPath& state,
                       const ControlSignal& control) {
  const TimeGrid& grid = state.grid;
  double cost = 0.0;
  for (int k = 0; k < grid.steps(); ++k)
    cost += problem.running_cost(grid.node(k), state[k], control[k]) * grid.dt();
  return cost + problem.terminal_cost(state[grid.steps()]);
}

CostEstimate evaluate_cost_mc(const OcpProblem& problem, const ControlSignal& control,
                              const EnsembleSpec& eval) {
  EnsembleSpec spec = eval;
  spec.noise_dim = problem.d();
  CostEstimate est;
  est.samples.reserve(static_cast<std::size_t>(spec.samples));
  for (int i = 0; i < spec.samples; ++i) {
    const GridRoughPath rp = stratonovich_lift(brownian_path(spec, control.grid, i));
    const SampledPath state = integrate_forward(problem.fields, problem.x0, control, rp);
    est.samples.push_back(trajectory_cost(problem, state, control));
  }
  double sum = 0.0;
  for (double c : est.samples) sum += c;
  est.mean = sum / static_cast<double>(est.samples.size());
  if (est.samples.size() > 1) {
    double ss = 0.0;
    for (double c : est.samples) ss += (c - est.mean) * (c - est.mean);
    const double var = ss / static_cast<double>(est.samples.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(est.samples.size()));
  }
  return est;
}

}  // namespace roughoc
