#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "christoffel/polybasis.hpp"

namespace christoffel {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n x p sample, one point per row. Coordinates are finite and n >= 1.
class PointCloud {
 public:
  explicit PointCloud(PointMatrix points);

  const PointMatrix& points() const { return points_; }
  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  int dim() const { return static_cast<int>(points_.cols()); }
  std::span<const double> point(std::size_t i) const {
    return {points_.data() + i * static_cast<std::size_t>(points_.cols()),
            static_cast<std::size_t>(points_.cols())};
  }

 private:
  PointMatrix points_;
};

/// Row i is v_d(x_i). Rows are filled in parallel.
Eigen::MatrixXd design_matrix(const PointCloud& cloud, const GradedBasis& basis);

enum class Normalization { MeanOverN, Sum };

struct MomentMatrix {
  Eigen::MatrixXd entries;
  GradedBasis basis;
  std::size_t sample_count = 0;
  Normalization normalization = Normalization::MeanOverN;

  int degree() const { return basis.max_degree(); }
  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }

  /// Moment matrix of the same sample at a lower degree (leading principal block).
  MomentMatrix truncated(int d) const;
};

/// (1/n) X^T X or X^T X, symmetrized.
MomentMatrix moment_matrix(const Eigen::MatrixXd& design, const GradedBasis& basis,
                           Normalization normalization = Normalization::MeanOverN);

/// Convenience: design_matrix followed by moment_matrix.
MomentMatrix moment_matrix(const PointCloud& cloud, const GradedBasis& basis,
                           Normalization normalization = Normalization::MeanOverN);

enum class ThresholdMode { Absolute, RelativeToLargest };

std::string to_string(ThresholdMode mode);
ThresholdMode threshold_mode_from_string(const std::string& name);

/// Which spectrum `value` is compared against. SingularValue compares the
/// singular values of the (normalized) design matrix, i.e. square roots of
/// the moment-matrix eigenvalues; it only resolves cuts below ~1e-8 when the
/// spectrum comes from the design route.
enum class ThresholdScale { Eigenvalue, SingularValue };

std::string to_string(ThresholdScale scale);
ThresholdScale threshold_scale_from_string(const std::string& name);

struct Threshold {
  double value = 1e-10;
  ThresholdMode mode = ThresholdMode::RelativeToLargest;
  ThresholdScale scale = ThresholdScale::Eigenvalue;

  /// Cut-off expressed on moment-matrix eigenvalues, given the largest one.
  double effective(double largest_eigenvalue) const;
};

/// Symmetric eigendecomposition with a numerical rank.
struct SpectralData {
  Eigen::VectorXd eigenvalues;   // non-increasing
  Eigen::MatrixXd eigenvectors;  // column j pairs with eigenvalues[j]
  int numerical_rank = 0;
  double threshold_used = 0.0;  // effective cut-off
  Threshold threshold;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

/// Eigendecomposition of M; rank counts eigenvalues strictly above the
/// effective threshold. Throws NumericalError if the eigensolver fails.
SpectralData spectral(const MomentMatrix& m, const Threshold& threshold = {});
SpectralData spectral(const Eigen::MatrixXd& symmetric, const Threshold& threshold = {});

/// Householder QR of a design matrix, reused for the spectra of its leading
/// column blocks. Because graded bases nest, the leading s(d') columns of a
/// degree-d design are the degree-d' design, and the leading block of R is
/// its triangular factor.
class DesignFactorization {
 public:
  DesignFactorization(const Eigen::MatrixXd& design, Normalization normalization);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return static_cast<std::size_t>(r_.cols()); }

  /// Spectrum of the moment matrix built from the first `leading_cols`
  /// columns, obtained from the SVD of the corresponding block of R.
  SpectralData spectral(std::size_t leading_cols, const Threshold& threshold) const;

 private:
  std::size_t rows_;
  Normalization normalization_;
  Eigen::MatrixXd r_;  // min(n, s) x s upper trapezoidal
};

/// Same spectrum from the SVD of the design matrix; accurate when n < s(d)
/// and the only route that resolves singular-value cuts.
SpectralData spectral_from_design(const Eigen::MatrixXd& design, Normalization normalization,
                                  const Threshold& threshold = {});

/// Eigenvectors at or below the threshold: coefficient vectors of polynomials
/// that numerically vanish on the sample.
std::vector<Eigen::VectorXd> kernel_basis(const SpectralData& spec);

/// Magic + header + row-major little-endian doubles. See README for the layout.
void write_moment_cache(const std::string& path, const MomentMatrix& m);
MomentMatrix read_moment_cache(const std::string& path);

}  // namespace christoffel
