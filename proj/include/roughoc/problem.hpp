#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "roughoc/vector_fields.hpp"

namespace roughoc {

/// Closed-form maximiser of the sample-average Hamiltonian at one node:
/// (t, states x^i, adjoints p^i, p0) -> u.
using ControlResolver =
    std::function<Vec(double, std::span<const Vec>, std::span<const Vec>, double)>;

/// Stochastic optimal control problem with deterministic controls:
///   min E[ int_0^T f(t,x,u) dt + g(x_T) ]  s.t.  dx = b dt + sigma dB.
/// Only the normal case p0 = -1 and r = 0 terminal constraints are solved.
struct OcpProblem {
  std::string name;
  VectorFieldBundle fields;
  double horizon = 1.0;
  Vec x0;
  int terminal_constraints = 0;
  double p0 = -1.0;

  std::function<double(double, const Vec&, const Vec&)> running_cost;
  std::function<Vec(double, const Vec&, const Vec&)> running_cost_grad_x;
  std::function<Vec(double, const Vec&, const Vec&)> running_cost_grad_u;
  /// Hessian of f in (x, u), (n+m) x (n+m). Required by the direct method.
  std::function<Mat(double, const Vec&, const Vec&)> running_cost_hessian;

  std::function<double(const Vec&)> terminal_cost;
  std::function<Vec(const Vec&)> terminal_cost_grad;

  ControlResolver resolver;

  int n() const { return fields.n; }
  int m() const { return fields.m; }
  int d() const { return fields.d; }
};

/// H = p^T b(t,x,u) + p0 f(t,x,u).
double hamiltonian(const OcpProblem& problem, double t, const Vec& x, const Vec& u, const Vec& p,
                   double p0);
Vec hamiltonian_grad_x(const OcpProblem& problem, double t, const Vec& x, const Vec& u,
                       const Vec& p, double p0);
Vec hamiltonian_grad_u(const OcpProblem& problem, double t, const Vec& x, const Vec& u,
                       const Vec& p, double p0);

/// mean_i grad_u H(t, x^i, u, p^i, p0): zero at an unconstrained maximiser.
Vec mean_hamiltonian_grad_u(const OcpProblem& problem, double t, std::span<const Vec> xs,
                            const Vec& u, std::span<const Vec> ps, double p0);

}  // namespace roughoc
