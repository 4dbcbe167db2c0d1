#include "christoffel/perturbation.hpp"

#include <cmath>
#include <stdexcept>

#include "christoffel/parallel.hpp"
#include "christoffel/rng.hpp"

namespace christoffel {

void NoiseLadder::validate() const {
  if (sigmas.empty()) throw std::invalid_argument("noise ladder: no noise levels given");
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] >= 0.0) || !std::isfinite(sigmas[i])) {
      throw std::invalid_argument("noise ladder: noise levels must be finite and non-negative");
    }
    if (i > 0 && !(sigmas[i] < sigmas[i - 1])) {
      throw std::invalid_argument("noise ladder: noise levels must be strictly decreasing");
    }
  }
}

PointCloud perturb_cloud(const PointCloud& base, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("perturb_cloud: sigma must be >= 0");
  PointMatrix pts = base.points();
  if (sigma == 0.0) return PointCloud(std::move(pts));
  const auto p = static_cast<std::size_t>(base.dim());
  parallel_for(base.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RandomStream rng(seed, i);
      double* row = pts.data() + i * p;
      for (std::size_t j = 0; j < p; ++j) row[j] += sigma * rng.normal();
    }
  });
  return PointCloud(std::move(pts));
}

NoiseSweep noise_sweep(const NoiseLadder& ladder, const SurfaceSpec& surface, int d, const EvaluationGrid& grid,
                       const DensityOptions& options) {
  ladder.validate();
  DensityOptions opts = options;
  if (opts.scale_box.empty() && opts.basis == BasisKind::TensorChebyshev) {
    opts.scale_box = bounding_box(ladder.base.points());
  }

  NoiseSweep out;
  out.reference = estimate_density(ladder.base, surface, d, grid, opts);

  opts.require_on_surface = false;
  for (double sigma : ladder.sigmas) {
    NoiseLevel level;
    level.sigma = sigma;
    level.grid = estimate_density(perturb_cloud(ladder.base, sigma, ladder.seed), surface, d, grid, opts);
    double acc = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      acc += std::abs(level.grid.lambda_pinv[k] - out.reference.lambda_pinv[k]);
    }
    level.deviation = grid.size() > 0 ? acc / static_cast<double>(grid.size()) : 0.0;
    out.levels.push_back(std::move(level));
  }
  return out;
}

}  // namespace christoffel
