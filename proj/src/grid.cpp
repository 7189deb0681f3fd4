#include "roughoc/grid.hpp"

#include <cmath>
#include <random>
#include <string>

namespace roughoc {

TimeGrid::TimeGrid(double t0, double t_final, int steps)
    : t0_(t0), t_final_(t_final), steps_(steps), dt_(0.0) {
  if (steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
  if (!(t_final > t0)) throw std::invalid_argument("TimeGrid: t_final must exceed t0");
  dt_ = (t_final - t0) / steps;
}

SampledPath::SampledPath(TimeGrid g, std::vector<Vec> v) : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.nodes())
    throw std::invalid_argument("SampledPath: expected N+1 values, got " +
                                std::to_string(values.size()));
}

ControlSignal::ControlSignal(TimeGrid g, std::vector<Vec> v) : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.steps())
    throw std::invalid_argument("ControlSignal: expected N values, got " +
                                std::to_string(values.size()));
}

ControlSignal ControlSignal::constant(const TimeGrid& g, const Vec& value) {
  return ControlSignal(g, std::vector<Vec>(static_cast<std::size_t>(g.steps()), value));
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  return splitmix64(h ^ splitmix64(index));
}

SampledPath brownian_path(const EnsembleSpec& spec, const TimeGrid& grid, int sample) {
  if (spec.noise_dim < 1) throw std::invalid_argument("brownian_path: noise_dim must be >= 1");
  std::mt19937_64 rng(derive_seed(spec.master_seed, StreamTag::kSample,
                                  static_cast<std::uint64_t>(sample)));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = std::sqrt(grid.dt());

  std::vector<Vec> values;
  values.reserve(static_cast<std::size_t>(grid.nodes()));
  values.push_back(Vec::Zero(spec.noise_dim));
  for (int k = 0; k < grid.steps(); ++k) {
    Vec next = values.back();
    for (int c = 0; c < spec.noise_dim; ++c) next(c) += scale * normal(rng);
    values.push_back(std::move(next));
  }
  return SampledPath(grid, std::move(values));
}

std::vector<SampledPath> brownian_sample(const EnsembleSpec& spec, const TimeGrid& grid) {
  if (spec.samples < 1) throw std::invalid_argument("brownian_sample: need M >= 1");
  std::vector<SampledPath> paths;
  paths.reserve(static_cast<std::size_t>(spec.samples));
  for (int i = 0; i < spec.samples; ++i) paths.push_back(brownian_path(spec, grid, i));
  return paths;
}

Vec increment(const SampledPath& path, int j, int k) {
  if (j < 0 || k < j || k > path.grid.steps())
    throw std::out_of_range("increment: need 0 <= j <= k <= N");
  return path[k] - path[j];
}

SampledPath subsample(const SampledPath& path, int factor) {
  if (factor < 1 || path.grid.steps() % factor != 0)
    throw std::invalid_argument("subsample: factor must divide the step count");
  TimeGrid coarse(path.grid.t0(), path.grid.t_final(), path.grid.steps() / factor);
  std::vector<Vec> values;
  values.reserve(static_cast<std::size_t>(coarse.nodes()));
  for (int k = 0; k <= path.grid.steps(); k += factor) values.push_back(path[k]);
  return SampledPath(coarse, std::move(values));
}

}  // namespace roughoc
