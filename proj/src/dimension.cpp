#include "christoffel/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace christoffel {

RankCurve rank_curve(const PointCloud& cloud, std::span<const int> degrees, BasisKind kind,
                     const Threshold& threshold, const ScaleBox& scale_box) {
  if (degrees.empty()) throw std::invalid_argument("rank_curve: no degrees requested");
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (degrees[i] < 0) throw std::invalid_argument("rank_curve: negative degree");
    if (i > 0 && degrees[i] <= degrees[i - 1]) throw std::invalid_argument("rank_curve: degrees must be strictly increasing");
  }
  const int p = cloud.dim();
  const int d_max = degrees.back();
  const auto s_max = basis_size(p, d_max);
  if (s_max > kMaxBasisSize) {
    throw std::invalid_argument("rank_curve: s(" + std::to_string(d_max) + ") = " + std::to_string(s_max) +
                                " exceeds the limit " + std::to_string(kMaxBasisSize));
  }

  RankCurve curve;
  curve.threshold = threshold;
  curve.basis_kind = kind;
  curve.ambient_dim = p;
  if (cloud.size() < s_max) {
    curve.warnings.push_back("n = " + std::to_string(cloud.size()) + " is below s(d_max) = " +
                             std::to_string(s_max) + "; ranks at high degree are capped by n");
  }

  const auto box = scale_box.empty() && kind == BasisKind::TensorChebyshev ? bounding_box(cloud.points()) : scale_box;
  const auto basis = GradedBasis::enumerate(p, d_max, kind, box);
  const DesignFactorization factor(design_matrix(cloud, basis), Normalization::MeanOverN);

  for (int d : degrees) {
    const auto s = basis_size(p, d);
    const auto spec = factor.spectral(s, threshold);
    RankObservation obs;
    obs.degree = d;
    obs.rank = spec.numerical_rank;
    obs.s_of_d = s;
    obs.n = cloud.size();
    obs.threshold_used = spec.threshold_used;
    obs.saturated = cloud.size() < s;
    curve.observations.push_back(obs);
  }
  return curve;
}

HilbertFit fit_hilbert(std::span<const RankObservation> observations, int k) {
  if (k < 0) throw std::invalid_argument("fit_hilbert: negative candidate degree");
  const auto m = static_cast<Eigen::Index>(observations.size());
  if (m < k + 2) {
    throw std::invalid_argument("fit_hilbert: degree-" + std::to_string(k) + " fit needs at least " +
                                std::to_string(k + 2) + " observations, got " + std::to_string(m));
  }
  Eigen::MatrixXd vander(m, k + 1);
  Eigen::VectorXd ranks(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double d = observations[static_cast<std::size_t>(i)].degree;
    double pw = 1.0;
    for (int j = 0; j <= k; ++j) {
      vander(i, j) = pw;
      pw *= d;
    }
    ranks[i] = observations[static_cast<std::size_t>(i)].rank;
  }
  HilbertFit fit;
  fit.k = k;
  fit.coefficients = vander.colPivHouseholderQr().solve(ranks);
  fit.rms_residual = std::sqrt((vander * fit.coefficients - ranks).squaredNorm() / static_cast<double>(m));
  return fit;
}

HilbertFit fit_hilbert(const RankCurve& curve, int k) { return fit_hilbert(curve.observations, k); }

DimensionEstimate estimate_dimension(const RankCurve& curve, int ambient_dim, double rel_fit_tol) {
  if (ambient_dim < 1) throw std::invalid_argument("estimate_dimension: ambient dimension must be >= 1");
  DimensionEstimate est;
  est.rel_fit_tol = rel_fit_tol;

  std::vector<RankObservation> used;
  std::copy_if(curve.observations.begin(), curve.observations.end(), std::back_inserter(used),
               [](const RankObservation& o) { return !o.saturated; });
  if (used.size() < 4) {
    est.reliable = false;
    est.notes.push_back("fewer than 4 unsaturated observations; fitting all observations");
    used = curve.observations;
  }
  for (const auto& o : used) est.fit_degrees_used.push_back(o.degree);

  if (used.size() < 4) {
    est.reliable = false;
    est.notes.push_back("fewer than 4 observations; no fit attempted");
    est.selected_dimension = ambient_dim;
    return est;
  }

  const double mean_rank =
      std::accumulate(used.begin(), used.end(), 0.0, [](double acc, const RankObservation& o) { return acc + o.rank; }) /
      static_cast<double>(used.size());
  const double gate = rel_fit_tol * mean_rank;

  std::optional<int> selected;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= ambient_dim && static_cast<int>(used.size()) >= k + 2; ++k) {
    auto fit = fit_hilbert(used, k);
    // nested least squares: residual cannot grow with k beyond roundoff
    fit.rms_residual = std::min(fit.rms_residual, previous);
    previous = fit.rms_residual;
    if (!selected && fit.rms_residual <= gate) selected = k;
    est.fits.push_back(std::move(fit));
  }
  if (selected) {
    est.selected_dimension = *selected;
  } else {
    est.selected_dimension = ambient_dim;
    est.reliable = false;
    est.notes.push_back("no candidate degree passed the residual gate");
  }
  return est;
}

std::size_t hilbert_oracle(OracleSurface surface, int d, int param) {
  if (d < 0) throw std::invalid_argument("hilbert_oracle: negative degree");
  const auto ud = static_cast<std::size_t>(d);
  switch (surface) {
    case OracleSurface::Cube:
      return static_cast<std::size_t>(binomial(d + param, param));
    case OracleSurface::Sphere3:
      return (ud + 1) * (ud + 1);
    case OracleSurface::Hypersurface3: {
      const auto full = static_cast<std::size_t>(binomial(d + 3, 3));
      if (d < param) return full;
      return full - static_cast<std::size_t>(binomial(d - param + 3, 3));
    }
    case OracleSurface::Circle:
      return 2 * ud + 1;
    case OracleSurface::BiTorus:
      return 2 * ud * ud + 2 * ud + 1;
  }
  return 0;
}

}  // namespace christoffel
