#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace roughoc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Uniform time grid t_k = t0 + k*dt, k = 0..N.
class TimeGrid {
 public:
  TimeGrid(double t0, double t_final, int steps);

  double t0() const { return t0_; }
  double t_final() const { return t_final_; }
  int steps() const { return steps_; }
  int nodes() const { return steps_ + 1; }
  double dt() const { return dt_; }
  double node(int k) const { return t0_ + k * dt_; }

  bool operator==(const TimeGrid& other) const {
    return t0_ == other.t0_ && t_final_ == other.t_final_ && steps_ == other.steps_;
  }

 private:
  double t0_;
  double t_final_;
  int steps_;
  double dt_;
};

/// Path sampled at every node of a grid.
struct SampledPath {
  TimeGrid grid;
  std::vector<Vec> values;

  SampledPath(TimeGrid g, std::vector<Vec> v);

  int dim() const { return static_cast<int>(values.front().size()); }
  const Vec& operator[](int k) const { return values[static_cast<std::size_t>(k)]; }
};

/// Piecewise-constant signal, values[k] held on [t_k, t_{k+1}).
struct ControlSignal {
  TimeGrid grid;
  std::vector<Vec> values;

  ControlSignal(TimeGrid g, std::vector<Vec> v);
  static ControlSignal constant(const TimeGrid& g, const Vec& value);

  int dim() const { return static_cast<int>(values.front().size()); }
  const Vec& operator[](int k) const { return values[static_cast<std::size_t>(k)]; }
};

struct EnsembleSpec {
  int samples = 1;       // M
  int noise_dim = 1;     // d
  std::uint64_t master_seed = 0;
};

/// Stream tags keep solve, evaluation and validation noise disjoint.
enum class StreamTag : std::uint64_t {
  kSample = 0x53414d50ULL,
  kSolve = 0x534f4c56ULL,
  kEvaluate = 0x4556414cULL,
  kValidate = 0x56414c44ULL,
};

/// splitmix64-based mixing of (seed, tag, index) into a fresh 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index);

/// M independent d-dimensional Brownian paths starting at zero. Sample i only
/// depends on (master_seed, i) and the grid.
std::vector<SampledPath> brownian_sample(const EnsembleSpec& spec, const TimeGrid& grid);

/// Single Brownian path for sample index i of the given spec.
SampledPath brownian_path(const EnsembleSpec& spec, const TimeGrid& grid, int sample);

/// values[k] - values[j]. Throws std::out_of_range unless 0 <= j <= k <= N.
Vec increment(const SampledPath& path, int j, int k);

/// Keeps every `factor`-th node; the grid must have a multiple of `factor` steps.
SampledPath subsample(const SampledPath& path, int factor);

}  // namespace roughoc
