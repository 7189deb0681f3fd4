#include <cmath>

#include <gtest/gtest.h>

#include "roughoc/rough_path.hpp"
#include "test_support.hpp"

namespace roughoc {
namespace {

using testing::Gen;
using testing::max_abs;

SampledPath path_from(const TimeGrid& grid, const std::vector<Vec>& xs) { return SampledPath(grid, xs); }

TEST(StratonovichLift, ScalarStep) {
  const TimeGrid grid(0.0, 1.0, 1);
  const GridRoughPath rp = stratonovich_lift(path_from(grid, {Vec::Zero(1), Vec::Constant(1, 0.3)}));
  EXPECT_NEAR(rp.level2[0](0, 0), 0.045, 1e-15);
}

TEST(StratonovichLift, TwoDimensionalStep) {
  const TimeGrid grid(0.0, 1.0, 1);
  const double a = 0.7;
  const double b = -1.3;
  const GridRoughPath rp = stratonovich_lift(path_from(grid, {Vec::Zero(2), (Vec(2) << a, b).finished()}));
  Mat expected(2, 2);
  expected << a * a / 2, a * b / 2, a * b / 2, b * b / 2;
  EXPECT_LE(max_abs(rp.level2[0] - expected), 1e-15);
}

TEST(StratonovichLift, SmoothPathIteratedIntegral) {
  // X = (t, t^2): int_0^1 X^1 dX^2 = int 2 t^2 dt = 2/3.
  const int steps = 256;
  const TimeGrid grid(0.0, 1.0, steps);
  std::vector<Vec> xs;
  for (int k = 0; k <= steps; ++k) {
    const double t = grid.node(k);
    xs.push_back((Vec(2) << t, t * t).finished());
  }
  const GridRoughPath rp = stratonovich_lift(path_from(grid, xs));
  const ComposedIncrement total = chen_compose(rp, 0, steps);
  EXPECT_NEAR(total.second(0, 1), 2.0 / 3.0, 1.0 / steps);
  EXPECT_NEAR(total.second(1, 0), 1.0 / 3.0, 1.0 / steps);
}

TEST(RoughPath, RejectsInconsistentLevels) {
  const TimeGrid grid(0.0, 1.0, 2);
  const SampledPath base(grid, std::vector<Vec>(3, Vec::Zero(2)));
  EXPECT_THROW(GridRoughPath(base, std::vector<Mat>(1, Mat::Zero(2, 2))), std::invalid_argument);
  EXPECT_THROW(GridRoughPath(base, std::vector<Mat>(2, Mat::Zero(3, 3))), std::invalid_argument);
}

TEST(ChenCompose, EmptyAndSingleStep) {
  Gen gen(1);
  const GridRoughPath rp = gen.rough_path(10, 3, false);
  const ComposedIncrement empty = chen_compose(rp, 4, 4);
  EXPECT_EQ(empty.first.norm(), 0.0);
  EXPECT_EQ(empty.second.norm(), 0.0);
  const ComposedIncrement one = chen_compose(rp, 4, 5);
  EXPECT_LE(max_abs(one.second - rp.level2[4]), 1e-15);
  EXPECT_LE(max_abs(one.first - (rp.base[5] - rp.base[4])), 1e-15);
}

TEST(ChenCompose, ChenRelationOnRandomTriples) {
  Gen gen(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int steps = gen.integer(2, 30);
    const GridRoughPath rp = gen.rough_path(steps, gen.integer(1, 4), trial % 2 == 0);
    int j = gen.integer(0, steps);
    int k = gen.integer(0, steps);
    if (j > k) std::swap(j, k);
    const int u = gen.integer(j, k);
    const ComposedIncrement a = chen_compose(rp, j, u);
    const ComposedIncrement b = chen_compose(rp, u, k);
    const ComposedIncrement c = chen_compose(rp, j, k);
    const Mat rhs = a.second + b.second + a.first * b.first.transpose();
    EXPECT_LE(max_abs(c.second - rhs), 1e-12 * (1.0 + max_abs(c.second)));
    EXPECT_LE(max_abs(c.first - a.first - b.first), 1e-12);
  }
}

TEST(ChenCompose, AntisymmetricPartMatchesDoubleSum) {
  // For the zero-area lift, XX_{jk} = sum_{u<v} dX_u (x) dX_v + 1/2 sum_u dX_u (x) dX_u.
  Gen gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int steps = gen.integer(2, 40);
    const SampledPath base = gen.rough_path(steps, 3, true).base;
    const GridRoughPath rp = stratonovich_lift(base);
    Mat brute = Mat::Zero(3, 3);
    for (int u = 0; u < steps; ++u) {
      const Vec du = base[u + 1] - base[u];
      brute += 0.5 * du * du.transpose();
      for (int v = u + 1; v < steps; ++v) brute += du * (base[v + 1] - base[v]).transpose();
    }
    const Mat fold = chen_compose(rp, 0, steps).second;
    const Mat anti_fold = 0.5 * (fold - fold.transpose());
    const Mat anti_brute = 0.5 * (brute - brute.transpose());
    EXPECT_LE(max_abs(anti_fold - anti_brute), 1e-12);
    EXPECT_LE(max_abs(fold - brute), 1e-12);
  }
}

TEST(CheckGeometric, StratonovichLiftIsGeometric) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SampledPath base = brownian_path({1, 3, seed}, TimeGrid(0.0, 1.0, 50), 0);
    EXPECT_TRUE(check_geometric(stratonovich_lift(base), 1e-12));
  }
}

TEST(CheckGeometric, AreaPerturbationStaysGeometric) {
  Gen gen(4);
  for (int trial = 0; trial < 10; ++trial) EXPECT_TRUE(check_geometric(gen.rough_path(30, 2, true), 1e-12));
}

TEST(CheckGeometric, ItoCorrectionIsNotGeometric) {
  const TimeGrid grid(0.0, 1.0, 50);
  const GridRoughPath strat = stratonovich_lift(brownian_path({1, 2, 8}, grid, 0));
  std::vector<Mat> ito = strat.level2;
  for (Mat& a : ito) a -= 0.5 * grid.dt() * Mat::Identity(2, 2);
  EXPECT_FALSE(check_geometric(GridRoughPath(strat.base, ito), 1e-12));
}

TEST(StepInput, CarriesIncrementAndArea) {
  Gen gen(5);
  const GridRoughPath rp = gen.rough_path(6, 2, false);
  const RoughStepInput in = step_input(rp, 3);
  EXPECT_DOUBLE_EQ(in.dt, 1.0 / 6.0);
  EXPECT_EQ(in.dx, rp.base[4] - rp.base[3]);
  EXPECT_EQ(in.area, rp.level2[3]);
  EXPECT_THROW(step_input(rp, 6), std::out_of_range);
}

}  // namespace
}  // namespace roughoc
