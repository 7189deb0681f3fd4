#include "roughoc/direct.hpp"

#include <chrono>
#include <limits>
#include <stdexcept>

#include <Eigen/SparseLU>

namespace roughoc {

using Triplet = Eigen::Triplet<double>;

Transcription::Transcription(const OcpProblem& problem, const std::vector<GridRoughPath>& ensemble,
                             const std::vector<Vec>& x0s)
    : problem_(problem),
      ensemble_(ensemble),
      x0s_(x0s),
      grid_(ensemble.empty() ? throw std::invalid_argument("Transcription: empty ensemble")
                             : ensemble.front().grid()),
      n_(problem.n()),
      m_(problem.m()),
      samples_(static_cast<int>(ensemble.size())),
      steps_(grid_.steps()),
      num_vars_(steps_ * m_ + samples_ * (steps_ + 1) * n_),
      num_constraints_(samples_ * (steps_ + 1) * n_) {
  if (static_cast<int>(x0s.size()) != samples_)
    throw std::invalid_argument("Transcription: need one initial state per sample");
  for (const auto& rp : ensemble) {
    if (!(rp.grid() == grid_)) throw std::invalid_argument("Transcription: grid mismatch");
    if (rp.dim() != problem.d()) throw std::invalid_argument("Transcription: noise dimension mismatch");
  }
  for (const Vec& x0 : x0s)
    if (x0.size() != n_) throw std::invalid_argument("Transcription: initial state dimension mismatch");
  if (!problem.running_cost_hessian)
    throw std::invalid_argument("Transcription: problem has no running-cost Hessian");
}

double Transcription::cost(const Vec& z) const {
  const double dt = grid_.dt();
  double total = 0.0;
  for (int i = 0; i < samples_; ++i) {
    for (int k = 0; k < steps_; ++k)
      total += problem_.running_cost(grid_.node(k), z.segment(state_index(i, k), n_),
                                     z.segment(control_index(k), m_)) * dt;
    total += problem_.terminal_cost(z.segment(state_index(i, steps_), n_));
  }
  return total / samples_;
}

Vec Transcription::cost_gradient(const Vec& z) const {
  const double w = grid_.dt() / samples_;
  Vec g = Vec::Zero(num_vars_);
  for (int i = 0; i < samples_; ++i) {
    for (int k = 0; k < steps_; ++k) {
      const Vec x = z.segment(state_index(i, k), n_);
      const Vec u = z.segment(control_index(k), m_);
      const double t = grid_.node(k);
      g.segment(state_index(i, k), n_) += w * problem_.running_cost_grad_x(t, x, u);
      g.segment(control_index(k), m_) += w * problem_.running_cost_grad_u(t, x, u);
    }
    g.segment(state_index(i, steps_), n_) +=
        problem_.terminal_cost_grad(z.segment(state_index(i, steps_), n_)) / samples_;
  }
  return g;
}

SparseMat Transcription::cost_hessian(const Vec& z) const {
  const double w = grid_.dt() / samples_;
  std::vector<Triplet> trips;
  for (int i = 0; i < samples_; ++i) {
    for (int k = 0; k < steps_; ++k) {
      const Mat h = problem_.running_cost_hessian(grid_.node(k), z.segment(state_index(i, k), n_),
                                                  z.segment(control_index(k), m_));
      const int xs = state_index(i, k);
      const int us = control_index(k);
      for (int r = 0; r < n_ + m_; ++r) {
        for (int c = 0; c < n_ + m_; ++c) {
          if (h(r, c) == 0.0) continue;
          const int row = r < n_ ? xs + r : us + (r - n_);
          const int col = c < n_ ? xs + c : us + (c - n_);
          trips.emplace_back(row, col, w * h(r, c));
        }
      }
    }
  }
  SparseMat out(num_vars_, num_vars_);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Vec Transcription::constraints(const Vec& z) const {
  Vec c(num_constraints_);
  const int offset = steps_ * m_;
  for (int i = 0; i < samples_; ++i) {
    const int row0 = state_index(i, 0) - offset;
    c.segment(row0, n_) = z.segment(state_index(i, 0), n_) - x0s_[static_cast<std::size_t>(i)];
    for (int k = 0; k < steps_; ++k) {
      const Vec next = rough_step(problem_.fields, grid_.node(k), z.segment(state_index(i, k), n_),
                                  z.segment(control_index(k), m_),
                                  step_input(ensemble_[static_cast<std::size_t>(i)], k));
      c.segment(state_index(i, k + 1) - offset, n_) = z.segment(state_index(i, k + 1), n_) - next;
    }
  }
  return c;
}

SparseMat Transcription::constraint_jacobian(const Vec& z) const {
  std::vector<Triplet> trips;
  const int offset = steps_ * m_;
  for (int i = 0; i < samples_; ++i) {
    for (int r = 0; r < n_; ++r) trips.emplace_back(state_index(i, 0) - offset + r, state_index(i, 0) + r, 1.0);
    for (int k = 0; k < steps_; ++k) {
      const int row = state_index(i, k + 1) - offset;
      const StepJacobians jac = rough_step_jacobians(
          problem_.fields, grid_.node(k), z.segment(state_index(i, k), n_),
          z.segment(control_index(k), m_), step_input(ensemble_[static_cast<std::size_t>(i)], k));
      for (int r = 0; r < n_; ++r) {
        trips.emplace_back(row + r, state_index(i, k + 1) + r, 1.0);
        for (int c = 0; c < n_; ++c)
          if (jac.wrt_state(r, c) != 0.0)
            trips.emplace_back(row + r, state_index(i, k) + c, -jac.wrt_state(r, c));
        for (int c = 0; c < m_; ++c)
          if (jac.wrt_control(r, c) != 0.0)
            trips.emplace_back(row + r, control_index(k) + c, -jac.wrt_control(r, c));
      }
    }
  }
  SparseMat out(num_constraints_, num_vars_);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Vec Transcription::pack(const ControlSignal& control, const std::vector<SampledPath>& states) const {
  if (static_cast<int>(states.size()) != samples_)
    throw std::invalid_argument("Transcription::pack: need one trajectory per sample");
  Vec z(num_vars_);
  for (int k = 0; k < steps_; ++k) z.segment(control_index(k), m_) = control[k];
  for (int i = 0; i < samples_; ++i)
    for (int k = 0; k <= steps_; ++k)
      z.segment(state_index(i, k), n_) = states[static_cast<std::size_t>(i)][k];
  return z;
}

DecisionVector Transcription::unpack(const Vec& z) const {
  std::vector<Vec> controls;
  for (int k = 0; k < steps_; ++k) controls.push_back(z.segment(control_index(k), m_));
  DecisionVector out{ControlSignal(grid_, std::move(controls)), {}};
  for (int i = 0; i < samples_; ++i) {
    std::vector<Vec> xs;
    for (int k = 0; k <= steps_; ++k) xs.push_back(z.segment(state_index(i, k), n_));
    out.states.emplace_back(grid_, std::move(xs));
  }
  return out;
}

Vec Transcription::rollout(const ControlSignal& control) const {
  std::vector<SampledPath> states;
  for (int i = 0; i < samples_; ++i)
    states.push_back(integrate_forward(problem_.fields, x0s_[static_cast<std::size_t>(i)], control,
                                       ensemble_[static_cast<std::size_t>(i)]));
  return pack(control, states);
}

SqpResult sqp_solve(const Transcription& problem, const Vec& z0, const SqpOptions& opts) {
  if (!(opts.tolerance > 0.0)) throw std::invalid_argument("sqp_solve: tolerance must be > 0");
  const auto start = std::chrono::steady_clock::now();
  const int nv = problem.num_vars();
  const int nc = problem.num_constraints();

  SqpResult out{z0, Vec::Zero(nc), {}};
  NewtonReport& rep = out.report;
  rep.residual_inf = std::numeric_limits<double>::infinity();
  auto finish = [&]() {
    rep.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
  };

  Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>> solver;
  bool analyzed = false;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    Vec g;
    Vec c;
    SparseMat a;
    SparseMat h;
    try {
      g = problem.cost_gradient(out.solution);
      c = problem.constraints(out.solution);
      a = problem.constraint_jacobian(out.solution);
      h = problem.cost_hessian(out.solution);
    } catch (const std::exception& e) {
      rep.failure = std::string("evaluation failed: ") + e.what();
      return finish();
    }
    if (!g.allFinite() || !c.allFinite()) {
      rep.failure = "non-finite evaluation";
      return finish();
    }

    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(h.nonZeros() + 2 * a.nonZeros()));
    for (int col = 0; col < h.outerSize(); ++col)
      for (SparseMat::InnerIterator it(h, col); it; ++it)
        trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int col = 0; col < a.outerSize(); ++col)
      for (SparseMat::InnerIterator it(a, col); it; ++it) {
        trips.emplace_back(nv + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        trips.emplace_back(static_cast<int>(it.col()), nv + static_cast<int>(it.row()), it.value());
      }
    SparseMat kkt(nv + nc, nv + nc);
    kkt.setFromTriplets(trips.begin(), trips.end());
    kkt.makeCompressed();

    if (!analyzed) {
      solver.analyzePattern(kkt);
      analyzed = true;
    }
    solver.factorize(kkt);
    if (solver.info() != Eigen::Success) {
      rep.failure = "singular KKT matrix";
      return finish();
    }
    Vec rhs(nv + nc);
    rhs.head(nv) = -g;
    rhs.tail(nc) = -c;
    const Vec sol = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !sol.allFinite()) {
      rep.failure = "KKT solve failed";
      return finish();
    }

    out.solution += sol.head(nv);
    out.multipliers = sol.tail(nc);
    rep.residual_inf = sol.head(nv).lpNorm<Eigen::Infinity>();
    rep.history.push_back(rep.residual_inf);
    if (rep.residual_inf < opts.tolerance) {
      rep.converged = true;
      return finish();
    }
    rep.iterations = iter + 1;
  }
  rep.failure = "max iterations reached";
  return finish();
}

}  // namespace roughoc
