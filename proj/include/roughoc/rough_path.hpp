#pragma once

#include <vector>

#include "roughoc/grid.hpp"

namespace roughoc {

/// Grid-level rough path: the sampled base path plus one second-level matrix
/// per step. Second levels over longer intervals are always obtained by Chen
/// composition of the per-step ones.
struct GridRoughPath {
  SampledPath base;
  std::vector<Mat> level2;  // level2[k] ~ XX_{t_k, t_{k+1}}, d x d

  GridRoughPath(SampledPath path, std::vector<Mat> second_level);

  const TimeGrid& grid() const { return base.grid; }
  int dim() const { return base.dim(); }
  int steps() const { return base.grid.steps(); }
};

/// One step of a rough path: (dt, dX, XX).
struct RoughStepInput {
  double dt;
  Vec dx;
  Mat area;
};

RoughStepInput step_input(const GridRoughPath& rp, int k);

/// Zero-area Stratonovich lift: XX_k = 1/2 dX_k (x) dX_k.
GridRoughPath stratonovich_lift(const SampledPath& path);

struct ComposedIncrement {
  Vec first;
  Mat second;
};

/// Chen fold over [t_j, t_k]:
///   XX_{j,u+1} = XX_{j,u} + XX_{u,u+1} + X_{j,u} (x) X_{u,u+1}.
ComposedIncrement chen_compose(const GridRoughPath& rp, int j, int k);

/// Checks Sym(XX_{jk}) == 1/2 X_{jk} (x) X_{jk} on every node pair, entrywise,
/// with tolerance scaled by max(1, |1/2 X (x) X|).
bool check_geometric(const GridRoughPath& rp, double tol);

}  // namespace roughoc
