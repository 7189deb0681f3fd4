#include <cmath>

#include <gtest/gtest.h>

#include "roughoc/ocp.hpp"
#include "test_support.hpp"

namespace roughoc {
namespace {

using testing::Gen;
using testing::max_abs;

std::vector<OcpProblem> all_problems() {
  return {spacecraft_ol(SpacecraftConfig{}), spacecraft_fb(SpacecraftConfig{}), scalar_lqr_test()};
}

TEST(CrossMatrix, ActsAsCrossProduct) {
  Gen gen(41);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Vector3d x = gen.vec(3);
    const Eigen::Vector3d y = gen.vec(3);
    const Mat s = cross_matrix(x);
    EXPECT_LE(max_abs(s * y - Vec(x.cross(y))), 1e-14);
    EXPECT_LE(max_abs(s * Vec(x)), 1e-14);
    EXPECT_LE(max_abs(s + s.transpose()), 0.0);
  }
}

TEST(Spacecraft, DiffusionIsScaledDiagonal) {
  const OcpProblem problem = spacecraft_ol(SpacecraftConfig{});
  const Mat sigma = problem.fields.diffusion(0.0, problem.x0);
  EXPECT_LE(max_abs(sigma - Mat(0.4 * problem.x0.asDiagonal())), 1e-16);
  EXPECT_NEAR(problem.x0(1), -4.5 * M_PI / 180.0, 1e-15);
  EXPECT_DOUBLE_EQ(problem.horizon, 2.0);
}

TEST(Spacecraft, GyroscopicDriftVanishesWithoutControl) {
  // Free rotation about a principal axis is an equilibrium of the Euler equations.
  const OcpProblem problem = spacecraft_ol(SpacecraftConfig{});
  const Vec axis = (Vec(3) << 0.0, 0.7, 0.0).finished();
  EXPECT_LE(max_abs(problem.fields.drift(0.0, axis, Vec::Zero(3))), 1e-16);
  const Vec x = (Vec(3) << 0.1, 0.2, 0.3).finished();
  const Vec expected = (Vec(3) << -(4.0 - 2.0) * 0.2 * 0.3 / 3.0, -(3.0 - 4.0) * 0.3 * 0.1 / 2.0,
                        -(2.0 - 3.0) * 0.1 * 0.2 / 4.0).finished();
  EXPECT_LE(max_abs(problem.fields.drift(0.0, x, Vec::Zero(3)) - expected), 1e-15);
}

TEST(Spacecraft, ConfigValidation) {
  SpacecraftConfig bad;
  bad.inertia = (Vec(3) << 1.0, -1.0, 1.0).finished();
  EXPECT_THROW(spacecraft_ol(bad), std::invalid_argument);
  SpacecraftConfig short_x0;
  short_x0.x0 = Vec::Zero(2);
  EXPECT_THROW(spacecraft_fb(short_x0), std::invalid_argument);
  EXPECT_THROW(make_problem("bogus", SpacecraftConfig{}), std::invalid_argument);
  EXPECT_EQ(make_problem("lqr", SpacecraftConfig{}).name, "lqr");
}

TEST(VectorFields, AnalyticJacobiansMatchFiniteDifferences) {
  Gen gen(42);
  for (const OcpProblem& problem : all_problems()) {
    for (int trial = 0; trial < 20; ++trial) {
      const JacobianCheck check =
          check_jacobians(problem.fields, 0.0, gen.vec(problem.n()), gen.vec(problem.m(), 0.5));
      EXPECT_LE(check.drift, 1e-5) << problem.name;
      EXPECT_LE(check.drift_control, 1e-5) << problem.name;
      EXPECT_LE(check.diffusion, 1e-5) << problem.name;
    }
  }
}

TEST(VectorFields, CheckDetectsWrongJacobian) {
  OcpProblem problem = spacecraft_ol(SpacecraftConfig{});
  problem.fields.drift_jacobian = [](double, const Vec&, const Vec&) { return Mat(Mat::Identity(3, 3)); };
  EXPECT_GT(check_jacobians(problem.fields, 0.0, problem.x0, Vec::Zero(3)).drift, 0.1);
}

TEST(Hamiltonian, GradientsMatchFiniteDifferences) {
  Gen gen(43);
  for (const OcpProblem& problem : all_problems()) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vec x = gen.vec(problem.n());
      const Vec u = gen.vec(problem.m(), 0.5);
      const Vec p = gen.vec(problem.n());
      const double h = 1e-6;
      const Vec gx = hamiltonian_grad_x(problem, 0.1, x, u, p, -1.0);
      const Vec gu = hamiltonian_grad_u(problem, 0.1, x, u, p, -1.0);
      for (int j = 0; j < problem.n(); ++j) {
        Vec xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        const double fd = (hamiltonian(problem, 0.1, xp, u, p, -1.0) - hamiltonian(problem, 0.1, xm, u, p, -1.0)) / (2 * h);
        EXPECT_NEAR(gx(j), fd, 1e-6 * (1.0 + std::abs(fd))) << problem.name;
      }
      for (int j = 0; j < problem.m(); ++j) {
        Vec up = u, um = u;
        up(j) += h;
        um(j) -= h;
        const double fd = (hamiltonian(problem, 0.1, x, up, p, -1.0) - hamiltonian(problem, 0.1, x, um, p, -1.0)) / (2 * h);
        EXPECT_NEAR(gu(j), fd, 1e-6 * (1.0 + std::abs(fd))) << problem.name;
      }
    }
  }
}

TEST(Hamiltonian, RunningCostHessianMatchesGradients) {
  Gen gen(44);
  for (const OcpProblem& problem : all_problems()) {
    const int n = problem.n();
    const int m = problem.m();
    const Vec x = gen.vec(n);
    const Vec u = gen.vec(m, 0.5);
    const Mat hess = problem.running_cost_hessian(0.0, x, u);
    const double h = 1e-6;
    for (int j = 0; j < n + m; ++j) {
      Vec xp = x, xm = x, up = u, um = u;
      if (j < n) {
        xp(j) += h;
        xm(j) -= h;
      } else {
        up(j - n) += h;
        um(j - n) -= h;
      }
      Vec col(n + m);
      col << (problem.running_cost_grad_x(0.0, xp, up) - problem.running_cost_grad_x(0.0, xm, um)) / (2 * h),
          (problem.running_cost_grad_u(0.0, xp, up) - problem.running_cost_grad_u(0.0, xm, um)) / (2 * h);
      EXPECT_LE(max_abs(col - hess.col(j)), 1e-6) << problem.name;
    }
  }
}

TEST(Resolver, StationaryForRandomEnsembles) {
  Gen gen(45);
  for (const OcpProblem& problem : all_problems()) {
    for (int trial = 0; trial < 20; ++trial) {
      const int samples = gen.integer(1, 8);
      std::vector<Vec> xs, ps;
      for (int i = 0; i < samples; ++i) {
        xs.push_back(gen.vec(problem.n()));
        ps.push_back(gen.vec(problem.n()));
      }
      const Vec u = problem.resolver(0.0, xs, ps, -1.0);
      const Vec grad = mean_hamiltonian_grad_u(problem, 0.0, xs, u, ps, -1.0);
      EXPECT_LE(max_abs(grad), 1e-10) << problem.name;
    }
  }
}

TEST(Resolver, OpenLoopFormula) {
  const OcpProblem problem = spacecraft_ol(SpacecraftConfig{});
  const std::vector<Vec> xs{Vec::Zero(3), Vec::Ones(3)};
  const std::vector<Vec> ps{(Vec(3) << 3.0, 2.0, 4.0).finished(), (Vec(3) << 9.0, 6.0, 12.0).finished()};
  // mean p = (6, 4, 8); J^{-T} mean p = (2, 2, 2); R^{-1} = 1/3.
  EXPECT_LE(max_abs(problem.resolver(0.0, xs, ps, -1.0) - Vec::Constant(3, 2.0 / 3.0)), 1e-15);
}

TEST(Resolver, FeedbackZeroAdjointGivesZeroGain) {
  const OcpProblem problem = spacecraft_fb(SpacecraftConfig{});
  const std::vector<Vec> xs{Vec::Ones(3), (Vec(3) << 0.1, -0.2, 0.3).finished()};
  const std::vector<Vec> ps(2, Vec::Zero(3));
  EXPECT_EQ(problem.resolver(0.0, xs, ps, -1.0).norm(), 0.0);
}

TEST(Resolver, FeedbackSingleSampleFormula) {
  const OcpProblem problem = spacecraft_fb(SpacecraftConfig{});
  const Vec x = (Vec(3) << 0.5, -0.25, 2.0).finished();
  const Vec p = (Vec(3) << 1.0, 3.0, -2.0).finished();
  const Vec k = problem.resolver(0.0, std::vector<Vec>{x}, std::vector<Vec>{p}, -1.0);
  const Vec inertia = SpacecraftConfig{}.inertia;
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(k(j), p(j) / (inertia(j) * 3.0 * x(j)), 1e-14);
}

TEST(Resolver, FeedbackGuardWarnsAndZeroes) {
  const OcpProblem problem = spacecraft_fb(SpacecraftConfig{});
  const Vec x = (Vec(3) << 0.0, 1.0, 1.0).finished();
  ::testing::internal::CaptureStderr();
  const Vec k = problem.resolver(0.0, std::vector<Vec>{x}, std::vector<Vec>{Vec::Ones(3)}, -1.0);
  const std::string err = ::testing::internal::GetCapturedStderr();
  EXPECT_EQ(k(0), 0.0);
  EXPECT_TRUE(std::isfinite(k(1)));
  EXPECT_NE(err.find("warning"), std::string::npos);
}

TEST(Lqr, ZeroInitialStateNeedsNoControl) {
  const OcpProblem problem = scalar_lqr_test(0.0);
  const Vec u = problem.resolver(0.0, std::vector<Vec>{Vec::Zero(1)}, std::vector<Vec>{Vec::Zero(1)}, -1.0);
  EXPECT_EQ(u(0), 0.0);
  const TimeGrid grid(0.0, 1.0, 20);
  const CostEstimate cost = evaluate_cost_mc(problem, ControlSignal::constant(grid, Vec::Zero(1)), {3, 1, 0});
  EXPECT_EQ(cost.mean, 0.0);
  EXPECT_EQ(cost.std_error, 0.0);
}

TEST(Lqr, RiccatiControlBeatsZeroControl) {
  const OcpProblem problem = scalar_lqr_test();
  const int steps = 100;
  const TimeGrid grid(0.0, 1.0, steps);
  const std::vector<double> p = testing::riccati_p(-0.5, 1.0, 1.0, 1.0, steps);
  std::vector<Vec> controls;
  double x = 1.0;
  for (int k = 0; k < steps; ++k) {
    const double u = -p[static_cast<std::size_t>(k)] * x;
    controls.push_back(Vec::Constant(1, u));
    x += (-0.5 * x + u) * grid.dt();
  }
  const double optimal = evaluate_cost_mc(problem, ControlSignal(grid, controls), {1, 1, 0}).mean;
  const double idle = evaluate_cost_mc(problem, ControlSignal::constant(grid, Vec::Zero(1)), {1, 1, 0}).mean;
  EXPECT_LT(optimal, idle);
  // Value function 1/2 P(0) x0^2 within the discretisation error.
  EXPECT_NEAR(optimal, 0.5 * p[0], 0.01);
}

OcpProblem unit_cost_problem() {
  OcpProblem problem = scalar_lqr_test();
  problem.fields.drift = [](double, const Vec& x, const Vec&) -> Vec { return Vec::Zero(x.size()); };
  problem.running_cost = [](double, const Vec&, const Vec&) { return 1.0; };
  problem.horizon = 2.0;
  return problem;
}

TEST(CostMc, UnitRunningCostIntegratesHorizon) {
  const OcpProblem problem = unit_cost_problem();
  const TimeGrid grid(0.0, 2.0, 40);
  const CostEstimate cost = evaluate_cost_mc(problem, ControlSignal::constant(grid, Vec::Zero(1)), {5, 1, 0});
  EXPECT_NEAR(cost.mean, 2.0, 1e-12);
  EXPECT_NEAR(cost.std_error, 0.0, 1e-12);
}

TEST(CostMc, EstimatorVarianceHalvesWithDoubledSamples) {
  const OcpProblem problem = spacecraft_ol(SpacecraftConfig{});
  const TimeGrid grid(0.0, 2.0, 20);
  const ControlSignal u = ControlSignal::constant(grid, Vec::Zero(3));
  double var_small = 0.0;
  double var_large = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double a = evaluate_cost_mc(problem, u, {200, 3, seed}).std_error;
    const double b = evaluate_cost_mc(problem, u, {400, 3, seed + 1000}).std_error;
    var_small += a * a;
    var_large += b * b;
  }
  const double ratio = var_small / var_large;
  EXPECT_GT(ratio, 1.6);
  EXPECT_LT(ratio, 2.5);
}

TEST(CostMc, MeanIndependentOfSummationOrder) {
  const OcpProblem problem = spacecraft_ol(SpacecraftConfig{});
  const TimeGrid grid(0.0, 2.0, 20);
  const CostEstimate cost =
      evaluate_cost_mc(problem, ControlSignal::constant(grid, Vec::Constant(3, 0.01)), {64, 3, 5});
  double reversed = 0.0;
  for (auto it = cost.samples.rbegin(); it != cost.samples.rend(); ++it) reversed += *it;
  reversed /= static_cast<double>(cost.samples.size());
  EXPECT_NEAR(cost.mean, reversed, 1e-14 * cost.mean);
  EXPECT_GT(cost.std_error, 0.0);
}

TEST(CostMc, TrajectoryCostIsLeftEndpointSum) {
  const OcpProblem problem = scalar_lqr_test();
  const TimeGrid grid(0.0, 1.0, 4);
  const SampledPath state(grid, {Vec::Constant(1, 1.0), Vec::Constant(1, 2.0), Vec::Constant(1, 3.0),
                                 Vec::Constant(1, 4.0), Vec::Constant(1, 100.0)});
  const ControlSignal u = ControlSignal::constant(grid, Vec::Constant(1, 1.0));
  // 1/2 (x^2 + 1) summed over x = 1..4, times dt = 1/4; the final node only enters g = 0.
  EXPECT_NEAR(trajectory_cost(problem, state, u), 0.25 * 0.5 * (1 + 4 + 9 + 16 + 4), 1e-15);
}

TEST(LiftEnsemble, LiftsEverySample) {
  const auto paths = brownian_sample({4, 2, 3}, TimeGrid(0.0, 1.0, 8));
  const auto lifts = lift_ensemble(paths);
  ASSERT_EQ(lifts.size(), 4u);
  for (const auto& rp : lifts) EXPECT_TRUE(check_geometric(rp, 1e-12));
}

}  // namespace
}  // namespace roughoc
