#include "roughoc/pvar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roughoc {

double p_variation(const SampledPath& path, double p, int j, int k) {
  if (!(p >= 1.0)) throw std::invalid_argument("p_variation: need p >= 1");
  if (j < 0 || k <= j || k > path.grid.steps())
    throw std::out_of_range("p_variation: need 0 <= j < k <= N");
  const int n = k - j;
  std::vector<double> best(static_cast<std::size_t>(n + 1), 0.0);
  for (int t = 1; t <= n; ++t) {
    double b = 0.0;
    for (int s = 0; s < t; ++s)
      b = std::max(b, best[static_cast<std::size_t>(s)] +
                          std::pow((path[j + t] - path[j + s]).norm(), p));
    best[static_cast<std::size_t>(t)] = b;
  }
  return std::pow(best.back(), 1.0 / p);
}

std::vector<double> control_w_from(const GridRoughPath& rp, int start, int end, double p) {
  if (!(p >= 2.0 && p < 3.0)) throw std::invalid_argument("control_w: need 2 <= p < 3");
  if (start < 0 || end < start || end > rp.steps())
    throw std::out_of_range("control_w: need 0 <= j <= k <= N");
  const int n = end - start;
  const int d = rp.dim();
  const double half_p = 0.5 * p;

  // Prefix folds from `start`: X_{start,u} and XX_{start,u}. Any block is
  // recovered from Chen's relation XX_{v,u} = XX_{s,u} - XX_{s,v} - X_{s,v} (x) X_{v,u}.
  std::vector<Vec> px(static_cast<std::size_t>(n + 1), Vec::Zero(d));
  std::vector<Mat> pxx(static_cast<std::size_t>(n + 1), Mat::Zero(d, d));
  for (int u = 1; u <= n; ++u) {
    const Vec step = rp.base[start + u] - rp.base[start + u - 1];
    pxx[static_cast<std::size_t>(u)] = pxx[static_cast<std::size_t>(u - 1)] +
                                       rp.level2[static_cast<std::size_t>(start + u - 1)] +
                                       px[static_cast<std::size_t>(u - 1)] * step.transpose();
    px[static_cast<std::size_t>(u)] = rp.base[start + u] - rp.base[start];
  }

  std::vector<double> best1(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> best2(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> w(static_cast<std::size_t>(n + 1), 0.0);
  for (int u = 1; u <= n; ++u) {
    const auto uu = static_cast<std::size_t>(u);
    double b1 = 0.0;
    double b2 = 0.0;
    for (int v = 0; v < u; ++v) {
      const auto vv = static_cast<std::size_t>(v);
      const Vec x_vu = rp.base[start + u] - rp.base[start + v];
      const Mat xx_vu = pxx[uu] - pxx[vv] - px[vv] * x_vu.transpose();
      b1 = std::max(b1, best1[vv] + std::pow(x_vu.norm(), p));
      b2 = std::max(b2, best2[vv] + std::pow(xx_vu.norm(), half_p));
    }
    best1[uu] = b1;
    best2[uu] = b2;
    w[uu] = b1 + b2;
  }
  return w;
}

double control_w(const GridRoughPath& rp, int j, int k, double p) {
  return control_w_from(rp, j, k, p).back();
}

GreedyPartition greedy_partition(const GridRoughPath& rp, double alpha, double p, int j, int k) {
  if (!(alpha > 0.0)) throw std::invalid_argument("greedy_partition: need alpha > 0");
  GreedyPartition part;
  part.alpha = alpha;
  part.taus.push_back(j);
  int tau = j;
  while (tau < k) {
    const std::vector<double> w = control_w_from(rp, tau, k, p);
    int next = k;
    for (int u = 1; u <= k - tau; ++u) {
      if (w[static_cast<std::size_t>(u)] >= alpha) {
        next = tau + u;
        break;
      }
    }
    part.taus.push_back(next);
    tau = next;
  }
  if (part.taus.size() == 1) part.taus.push_back(k);  // empty interval j == k
  part.n_alpha = static_cast<int>(part.taus.size()) - 2;
  return part;
}

}  // namespace roughoc
