#include "christoffel/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "christoffel/parallel.hpp"

namespace christoffel {

std::size_t sphere_N(int p, int d) {
  if (p < 2) throw std::invalid_argument("sphere_N: p must be >= 2");
  if (d < 0) throw std::invalid_argument("sphere_N: d must be >= 0");
  return static_cast<std::size_t>(binomial(p + d - 1, p - 1) + binomial(p + d - 2, p - 1));
}

std::size_t normalization_constant(const SurfaceSpec& spec, int d) {
  if (d < 0) throw std::invalid_argument("normalization_constant: d must be >= 0");
  const auto ud = static_cast<std::size_t>(d);
  switch (spec.kind) {
    case SurfaceKind::Circle: return 2 * ud + 1;
    case SurfaceKind::Sphere: return sphere_N(spec.ambient_dim, d);
    case SurfaceKind::BiTorus: return 2 * ud * ud + 2 * ud + 1;
    default:
      throw std::invalid_argument("normalization_constant: density estimation supports circle, sphere and bitorus");
  }
}

DensityGrid evaluate_density(const ChristoffelEvaluator& ev, const Eigen::MatrixXd& design, std::size_t n_of_d,
                             const EvaluationGrid& grid) {
  DensityGrid out;
  out.grid = grid;
  out.degree = ev.basis().max_degree();
  out.sample_count = static_cast<std::size_t>(design.rows());
  out.n_of_d = n_of_d;
  out.rank = ev.rank();

  const auto& eig = ev.spectral().eigenvalues;
  out.retained_eigen_ratio = out.rank > 0 && eig[0] > 0.0 ? eig[out.rank - 1] / eig[0] : 0.0;
  if (out.rank > 0 && out.retained_eigen_ratio < 1e-8) {
    std::ostringstream msg;
    msg << "ill-conditioned moment matrix: smallest retained eigenvalue is " << out.retained_eigen_ratio
        << " times the largest; consider a lower degree";
    out.warnings.push_back(msg.str());
  }

  // trace diagnostic: mean of kappa(x_i, x_i) over the sample
  Eigen::VectorXd kappa(design.rows());
  parallel_for(static_cast<std::size_t>(design.rows()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Eigen::VectorXd v = design.row(static_cast<Eigen::Index>(i)).transpose();
      kappa[static_cast<Eigen::Index>(i)] = ev.kernel_from_vectors(v, v);
    }
  });
  out.sample_kappa_mean = kappa.mean();

  const auto m = grid.size();
  out.values.resize(m);
  out.lambda_pinv.resize(m);
  out.kernel_residuals.resize(m);
  const double scale = static_cast<double>(n_of_d);
  parallel_for(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto lam = ev.lambda(grid.point(k));
      out.values[k] = scale * lam.value;
      out.lambda_pinv[k] = lam.pinv_value;
      out.kernel_residuals[k] = lam.kernel_residual;
    }
  }, 64);
  if (m > 0) {
    const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
    out.min_value = *lo;
    out.max_value = *hi;
  }
  return out;
}

namespace {

void check_membership(const PointCloud& cloud, const SurfaceSpec& surface, double tol) {
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double r = membership_residual(surface, cloud.point(i));
    if (!(r <= tol)) {
      std::ostringstream msg;
      msg << "point " << i << " is off the " << to_string(surface.kind) << ": membership residual " << r
          << " exceeds " << tol;
      throw std::invalid_argument(msg.str());
    }
  }
}

}  // namespace

DensityGrid estimate_density(const PointCloud& cloud, const SurfaceSpec& surface, int d, const EvaluationGrid& grid,
                             const DensityOptions& options) {
  if (d < 0) throw std::invalid_argument("estimate_density: degree must be >= 0");
  if (cloud.dim() != surface.ambient_dim) throw std::invalid_argument("estimate_density: cloud dimension mismatch");
  if (grid.size() > 0 && grid.points.cols() != surface.ambient_dim) {
    throw std::invalid_argument("estimate_density: grid dimension mismatch");
  }
  const auto n_of_d = normalization_constant(surface, d);
  if (options.require_on_surface) check_membership(cloud, surface, options.membership_tol);
  const auto s = basis_size(surface.ambient_dim, d);
  if (cloud.size() < s) {
    throw std::invalid_argument("estimate_density: n = " + std::to_string(cloud.size()) + " is below s(d) = " +
                                std::to_string(s));
  }

  const auto box = options.scale_box.empty() && options.basis == BasisKind::TensorChebyshev
                       ? bounding_box(cloud.points())
                       : options.scale_box;
  const auto basis = GradedBasis::enumerate(surface.ambient_dim, d, options.basis, box);
  const Eigen::MatrixXd design = design_matrix(cloud, basis);
  const auto m = moment_matrix(design, basis);
  const ChristoffelEvaluator ev(spectral(m, options.threshold), basis, options.kernel_tol);
  return evaluate_density(ev, design, n_of_d, grid);
}

std::vector<ConvergenceRow> convergence_experiment(const SurfaceSpec& surface,
                                                   const std::function<double(std::span<const double>)>& f,
                                                   double f_max, std::span<const int> degrees, std::size_t n,
                                                   std::span<const std::uint64_t> seeds, const EvaluationGrid& grid,
                                                   const DensityOptions& options) {
  if (degrees.empty() || seeds.empty()) throw std::invalid_argument("convergence_experiment: empty degree or seed list");
  const int d_max = *std::max_element(degrees.begin(), degrees.end());
  std::vector<double> target(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) target[k] = f(grid.point(k));

  std::vector<ConvergenceRow> rows(degrees.size());
  for (std::size_t j = 0; j < degrees.size(); ++j) rows[j].degree = degrees[j];

  for (const auto seed : seeds) {
    const auto cloud = sample_with_density(surface, f, f_max, n, seed);
    const auto box = options.scale_box.empty() && options.basis == BasisKind::TensorChebyshev
                         ? bounding_box(cloud.points())
                         : options.scale_box;
    const auto basis = GradedBasis::enumerate(surface.ambient_dim, d_max, options.basis, box);
    const Eigen::MatrixXd design = design_matrix(cloud, basis);
    const auto full = moment_matrix(design, basis);
    for (std::size_t j = 0; j < degrees.size(); ++j) {
      const int d = degrees[j];
      const auto m = full.truncated(d);
      const ChristoffelEvaluator ev(spectral(m, options.threshold), m.basis, options.kernel_tol);
      const auto cols = static_cast<Eigen::Index>(m.size());
      const auto dg = evaluate_density(ev, design.leftCols(cols), normalization_constant(surface, d), grid);
      double sup = 0.0;
      double mean = 0.0;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double err = std::abs(dg.values[k] - target[k]);
        sup = std::max(sup, err);
        mean += err;
      }
      rows[j].sup_error += sup / static_cast<double>(seeds.size());
      rows[j].mean_error += mean / static_cast<double>(grid.size()) / static_cast<double>(seeds.size());
    }
  }
  return rows;
}

}  // namespace christoffel
