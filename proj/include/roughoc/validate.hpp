#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roughoc/bench.hpp"

namespace roughoc {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;  // the measured quantity the check is decided on
  std::string detail;
};

/// Rough step of the spacecraft state-adjoint field against a componentwise
/// Milstein step over random (x, p, u, dB). value = worst relative entry error.
CheckResult check_milstein_identity(std::uint64_t seed, int draws = 1000, double tol = 1e-12);

/// Chen relation on every node triple and the geometric identity on every
/// node pair of random Brownian lifts. value = worst entry error.
CheckResult check_chen_geometric(std::uint64_t seed, int steps = 64, int dim = 3, int paths = 4,
                                 double tol = 1e-12);

/// Needle ratios |Y^pi - Y - eta V|_inf / eta^2 for eta in {8, 4, 2} dt on the
/// nominal OL solution. value = max/min ratio.
CheckResult check_needle_ratios(std::uint64_t seed, int steps = 40, int samples = 10,
                                double band = 3.0);

/// Pairing drift at N and 2N on nested Brownian paths. value = drift(N) / drift(2N).
CheckResult check_pairing_drift(std::uint64_t seed, int steps = 40, double lo = 1.5,
                                double hi = 3.0);

/// alpha * N_alpha <= w(0, T) on random lifts, p = 2.5.
/// value = worst alpha * N_alpha / w(0, T).
CheckResult check_greedy_inequality(std::uint64_t seed, int paths = 100, int steps = 64,
                                    int dim = 2, const std::vector<double>& alphas = {0.1, 1.0, 10.0});

/// All of the above, seeded from (master_seed, kValidate, check index).
std::vector<CheckResult> run_validation(const RunConfig& config);

}  // namespace roughoc
