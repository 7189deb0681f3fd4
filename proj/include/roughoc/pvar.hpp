#pragma once

#include <vector>

#include "roughoc/rough_path.hpp"

namespace roughoc {

// Variation diagnostics over the grid node set. Norms are Euclidean for the
// first level and Frobenius for the second level.

/// Exact discrete p-variation of the nodes t_j..t_k, by dynamic programming.
double p_variation(const SampledPath& path, double p, int j, int k);

/// w(j,k) = ||X||_{p,[j,k]}^p + ||XX||_{p/2,[j,k]}^{p/2}, 2 <= p < 3.
double control_w(const GridRoughPath& rp, int j, int k, double p);

/// w(start, u) for every u in [start, end]; entry 0 corresponds to u = start.
std::vector<double> control_w_from(const GridRoughPath& rp, int start, int end, double p);

struct GreedyPartition {
  double alpha = 0.0;
  std::vector<int> taus;
  int n_alpha = 0;
};

/// tau_{i+1} = first node u > tau_i with w(tau_i, u) >= alpha, capped at k.
GreedyPartition greedy_partition(const GridRoughPath& rp, double alpha, double p, int j, int k);

}  // namespace roughoc
