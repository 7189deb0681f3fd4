#include "roughoc/rough_path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roughoc {

GridRoughPath::GridRoughPath(SampledPath path, std::vector<Mat> second_level)
    : base(std::move(path)), level2(std::move(second_level)) {
  if (static_cast<int>(level2.size()) != base.grid.steps())
    throw std::invalid_argument("GridRoughPath: need one second-level matrix per step");
  const int d = base.dim();
  for (const Mat& m : level2)
    if (m.rows() != d || m.cols() != d)
      throw std::invalid_argument("GridRoughPath: second level must be d x d");
}

RoughStepInput step_input(const GridRoughPath& rp, int k) {
  if (k < 0 || k >= rp.steps()) throw std::out_of_range("step_input: step index out of range");
  return {rp.grid().dt(), rp.base[k + 1] - rp.base[k], rp.level2[static_cast<std::size_t>(k)]};
}

GridRoughPath stratonovich_lift(const SampledPath& path) {
  std::vector<Mat> level2;
  level2.reserve(static_cast<std::size_t>(path.grid.steps()));
  for (int k = 0; k < path.grid.steps(); ++k) {
    const Vec dx = path[k + 1] - path[k];
    level2.push_back(0.5 * dx * dx.transpose());
  }
  return GridRoughPath(path, std::move(level2));
}

ComposedIncrement chen_compose(const GridRoughPath& rp, int j, int k) {
  if (j < 0 || k < j || k > rp.steps())
    throw std::out_of_range("chen_compose: need 0 <= j <= k <= N");
  const int d = rp.dim();
  Vec first = Vec::Zero(d);
  Mat second = Mat::Zero(d, d);
  for (int u = j; u < k; ++u) {
    const Vec step = rp.base[u + 1] - rp.base[u];
    second += rp.level2[static_cast<std::size_t>(u)] + first * step.transpose();
    first += step;
  }
  // The base increment is read off the path itself so it is exact.
  first = rp.base[k] - rp.base[j];
  return {std::move(first), std::move(second)};
}

bool check_geometric(const GridRoughPath& rp, double tol) {
  const int n = rp.steps();
  const int d = rp.dim();
  for (int j = 0; j < n; ++j) {
    // Incremental fold from j, equivalent to chen_compose(rp, j, k) for each k.
    Vec first = Vec::Zero(d);
    Mat second = Mat::Zero(d, d);
    for (int k = j + 1; k <= n; ++k) {
      const Vec step = rp.base[k] - rp.base[k - 1];
      second += rp.level2[static_cast<std::size_t>(k - 1)] + first * step.transpose();
      first += step;
      const Mat expected = 0.5 * first * first.transpose();
      const Mat sym = 0.5 * (second + second.transpose());
      const double scale = std::max(1.0, expected.cwiseAbs().maxCoeff());
      if ((sym - expected).cwiseAbs().maxCoeff() > tol * scale) return false;
    }
  }
  return true;
}

}  // namespace roughoc
