#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "christoffel/christoffel.hpp"
#include "christoffel/geometry.hpp"
#include "christoffel/moments.hpp"

namespace christoffel {

/// Dimension of polynomials of degree <= d on the unit sphere S^{p-1}:
/// C(p+d-1, p-1) + C(p+d-2, p-1).
std::size_t sphere_N(int p, int d);

/// N(d) for the reference measure of a boundary-free test set:
/// circle 2d+1, sphere sphere_N, bi-torus 2d^2+2d+1.
std::size_t normalization_constant(const SurfaceSpec& spec, int d);

struct DensityOptions {
  BasisKind basis = BasisKind::TensorChebyshev;
  Threshold threshold;  // relative 1e-10 on eigenvalues
  double kernel_tol = kDefaultKernelTol;
  double membership_tol = 1e-6;
  bool require_on_surface = true;
  ScaleBox scale_box;  // empty: padded bounding box of the cloud
};

/// N(d) * Lambda on an evaluation grid.
struct DensityGrid {
  EvaluationGrid grid;
  std::vector<double> values;            // N(d) * Lambda (zero off the numerical support)
  std::vector<double> lambda_pinv;       // 1 / kappa(z, z), whatever the kernel residual
  std::vector<double> kernel_residuals;
  int degree = 0;
  std::size_t sample_count = 0;
  std::size_t n_of_d = 0;
  int rank = 0;
  double min_value = 0.0;
  double max_value = 0.0;
  /// (1/n) sum_i kappa(x_i, x_i) over the sample; equals rank.
  double sample_kappa_mean = 0.0;
  /// Smallest retained eigenvalue over the largest.
  double retained_eigen_ratio = 0.0;
  std::vector<std::string> warnings;
};

/// Builds the moment matrix of `cloud`, then evaluates N(d) * Lambda at each
/// grid point. Rejects clouds that leave the surface by more than
/// options.membership_tol (unless require_on_surface is false) and clouds with
/// n < s(d).
DensityGrid estimate_density(const PointCloud& cloud, const SurfaceSpec& surface, int d, const EvaluationGrid& grid,
                             const DensityOptions& options = {});

/// Evaluates an existing model on a grid; `design` is the sample design used
/// for the trace diagnostic.
DensityGrid evaluate_density(const ChristoffelEvaluator& ev, const Eigen::MatrixXd& design, std::size_t n_of_d,
                             const EvaluationGrid& grid);

struct ConvergenceRow {
  int degree = 0;
  double sup_error = 0.0;   // max over grid of |N(d) Lambda - f|, seed-averaged
  double mean_error = 0.0;  // mean over grid, seed-averaged
};

/// For each seed, samples n points from density f (w.r.t. the normalized area
/// measure), then compares N(d) * Lambda against f on the grid for every
/// degree.
std::vector<ConvergenceRow> convergence_experiment(const SurfaceSpec& surface,
                                                   const std::function<double(std::span<const double>)>& f,
                                                   double f_max, std::span<const int> degrees, std::size_t n,
                                                   std::span<const std::uint64_t> seeds, const EvaluationGrid& grid,
                                                   const DensityOptions& options = {});

}  // namespace christoffel
