#include "roughoc/problem.hpp"

namespace roughoc {

double hamiltonian(const OcpProblem& problem, double t, const Vec& x, const Vec& u, const Vec& p,
                   double p0) {
  return p.dot(problem.fields.drift(t, x, u)) + p0 * problem.running_cost(t, x, u);
}

Vec hamiltonian_grad_x(const OcpProblem& problem, double t, const Vec& x, const Vec& u,
                       const Vec& p, double p0) {
  return problem.fields.drift_jacobian(t, x, u).transpose() * p +
         p0 * problem.running_cost_grad_x(t, x, u);
}

Vec hamiltonian_grad_u(const OcpProblem& problem, double t, const Vec& x, const Vec& u,
                       const Vec& p, double p0) {
  return problem.fields.drift_control_jacobian(t, x, u).transpose() * p +
         p0 * problem.running_cost_grad_u(t, x, u);
}

Vec mean_hamiltonian_grad_u(const OcpProblem& problem, double t, std::span<const Vec> xs,
                            const Vec& u, std::span<const Vec> ps, double p0) {
  Vec acc = Vec::Zero(problem.m());
  for (std::size_t i = 0; i < xs.size(); ++i)
    acc += hamiltonian_grad_u(problem, t, xs[i], u, ps[i], p0);
  return acc / static_cast<double>(xs.size());
}

}  // namespace roughoc
