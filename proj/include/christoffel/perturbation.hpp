#pragma once

#include <cstdint>
#include <vector>

#include "christoffel/density.hpp"

namespace christoffel {

/// Noise levels applied to a base cloud. Levels are strictly decreasing and
/// non-negative; sigma is the per-coordinate standard deviation.
struct NoiseLadder {
  PointCloud base;
  std::vector<double> sigmas;
  std::uint64_t seed = 0;

  void validate() const;
};

/// y_i = x_i + sigma * eps_i with eps_i standard Gaussian. The same eps_i is
/// used for every sigma under a given seed.
PointCloud perturb_cloud(const PointCloud& base, double sigma, std::uint64_t seed);

struct NoiseLevel {
  double sigma = 0.0;
  DensityGrid grid;
  /// Mean over the grid of |Lambda_sigma - Lambda_0| (pseudo-inverse values).
  double deviation = 0.0;
};

struct NoiseSweep {
  DensityGrid reference;  // sigma = 0
  std::vector<NoiseLevel> levels;
};

/// Christoffel function of each perturbed cloud on `grid`, compared against
/// the noiseless reference. All levels share the reference cloud's scale box.
NoiseSweep noise_sweep(const NoiseLadder& ladder, const SurfaceSpec& surface, int d, const EvaluationGrid& grid,
                       const DensityOptions& options = {});

}  // namespace christoffel
