#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "christoffel/moments.hpp"
#include "christoffel/polybasis.hpp"

namespace christoffel {

struct RankObservation {
  int degree = 0;
  int rank = 0;
  std::size_t s_of_d = 0;
  std::size_t n = 0;
  double threshold_used = 0.0;
  /// n < s(d): the rank is capped by the sample size.
  bool saturated = false;
};

struct RankCurve {
  std::vector<RankObservation> observations;
  Threshold threshold;
  BasisKind basis_kind = BasisKind::TensorChebyshev;
  int ambient_dim = 0;
  std::vector<std::string> warnings;
};

/// Largest s(d) accepted by rank_curve.
inline constexpr std::size_t kMaxBasisSize = 5000;

/// Threshold used for rank curves: singular values of the normalized design,
/// relative cut 1e-10.
inline Threshold default_rank_threshold() {
  return {1e-10, ThresholdMode::RelativeToLargest, ThresholdScale::SingularValue};
}

/// Numerical rank of the empirical moment matrix at each degree. The design
/// is built once at the largest degree; each degree uses its leading columns.
/// When `scale_box` is empty the padded bounding box of the cloud is used.
RankCurve rank_curve(const PointCloud& cloud, std::span<const int> degrees,
                     BasisKind kind = BasisKind::TensorChebyshev, const Threshold& threshold = default_rank_threshold(),
                     const ScaleBox& scale_box = {});

struct HilbertFit {
  int k = 0;
  Eigen::VectorXd coefficients;  // in powers 1, d, ..., d^k
  double rms_residual = 0.0;
};

/// Ordinary least squares of rank against (1, d, ..., d^k) over the given
/// observations. Requires at least k + 2 of them.
HilbertFit fit_hilbert(std::span<const RankObservation> observations, int k);
HilbertFit fit_hilbert(const RankCurve& curve, int k);

inline constexpr double kDefaultRelFitTol = 1e-3;

struct DimensionEstimate {
  std::vector<HilbertFit> fits;  // k = 0..p, where enough observations exist
  int selected_dimension = 0;
  std::vector<int> fit_degrees_used;
  double rel_fit_tol = kDefaultRelFitTol;
  /// False when saturated observations had to be used, too few observations
  /// existed, or no candidate passed the residual gate.
  bool reliable = true;
  std::vector<std::string> notes;
};

/// Smallest k whose rms residual is at most rel_fit_tol times the mean rank
/// over the fitted window. Saturated observations are excluded unless fewer
/// than four remain.
DimensionEstimate estimate_dimension(const RankCurve& curve, int ambient_dim,
                                     double rel_fit_tol = kDefaultRelFitTol);

enum class OracleSurface { Cube, Sphere3, Hypersurface3, Circle, BiTorus };

/// Hilbert function of the test sets: dimension of polynomials of degree <= d
/// restricted to the set. `param` is p for Cube and the degree k of the
/// defining polynomial for Hypersurface3.
std::size_t hilbert_oracle(OracleSurface surface, int d, int param = 3);

}  // namespace christoffel
