#include "christoffel/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "christoffel/errors.hpp"
#include "christoffel/parallel.hpp"

namespace christoffel {

PointCloud::PointCloud(PointMatrix points) : points_(std::move(points)) {
  if (points_.rows() < 1) throw std::invalid_argument("PointCloud: at least one point is required");
  if (points_.cols() < 1) throw std::invalid_argument("PointCloud: ambient dimension must be >= 1");
  if (!points_.allFinite()) {
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
      if (!points_.row(i).allFinite()) {
        throw std::invalid_argument("PointCloud: non-finite coordinate in point " + std::to_string(i));
      }
    }
  }
}

Eigen::MatrixXd design_matrix(const PointCloud& cloud, const GradedBasis& basis) {
  if (cloud.dim() != basis.ambient_dim()) {
    throw std::invalid_argument("design_matrix: cloud dimension " + std::to_string(cloud.dim()) +
                                " does not match basis dimension " + std::to_string(basis.ambient_dim()));
  }
  const auto n = cloud.size();
  const auto s = basis.size();
  // row-major scratch so each row is written contiguously
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(n, s);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      basis.evaluate_into(cloud.point(i), std::span<double>(rows.data() + i * s, s));
    }
  });
  return rows;
}

MomentMatrix MomentMatrix::truncated(int d) const {
  if (d > degree()) throw std::invalid_argument("MomentMatrix::truncated: degree exceeds source degree");
  MomentMatrix out;
  out.basis = basis.truncated(d);
  const auto s = static_cast<Eigen::Index>(out.basis.size());
  out.entries = entries.topLeftCorner(s, s);
  out.sample_count = sample_count;
  out.normalization = normalization;
  return out;
}

MomentMatrix moment_matrix(const Eigen::MatrixXd& design, const GradedBasis& basis,
                           Normalization normalization) {
  if (design.rows() == 0 || design.cols() == 0) throw std::invalid_argument("moment_matrix: empty design");
  if (static_cast<std::size_t>(design.cols()) != basis.size()) {
    throw std::invalid_argument("moment_matrix: design width does not match basis size");
  }
  const auto s = design.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(s, s);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(design.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  if (normalization == Normalization::MeanOverN) gram /= static_cast<double>(design.rows());
  MomentMatrix m;
  m.entries = 0.5 * (gram + gram.transpose());
  m.basis = basis;
  m.sample_count = static_cast<std::size_t>(design.rows());
  m.normalization = normalization;
  return m;
}

MomentMatrix moment_matrix(const PointCloud& cloud, const GradedBasis& basis, Normalization normalization) {
  return moment_matrix(design_matrix(cloud, basis), basis, normalization);
}

std::string to_string(ThresholdMode mode) {
  return mode == ThresholdMode::Absolute ? "absolute" : "relative";
}

ThresholdMode threshold_mode_from_string(const std::string& name) {
  if (name == "absolute") return ThresholdMode::Absolute;
  if (name == "relative") return ThresholdMode::RelativeToLargest;
  throw std::invalid_argument("unknown threshold mode '" + name + "' (expected relative|absolute)");
}

std::string to_string(ThresholdScale scale) {
  return scale == ThresholdScale::Eigenvalue ? "eigenvalue" : "singular-value";
}

ThresholdScale threshold_scale_from_string(const std::string& name) {
  if (name == "eigenvalue") return ThresholdScale::Eigenvalue;
  if (name == "singular-value" || name == "singular") return ThresholdScale::SingularValue;
  throw std::invalid_argument("unknown threshold scale '" + name + "' (expected eigenvalue|singular-value)");
}

double Threshold::effective(double largest_eigenvalue) const {
  const double cut = scale == ThresholdScale::Eigenvalue ? value : value * value;
  if (mode == ThresholdMode::Absolute) return cut;
  return cut * std::max(largest_eigenvalue, 0.0);
}

namespace {

SpectralData finish_spectral(Eigen::VectorXd ascending_values, Eigen::MatrixXd ascending_vectors,
                             const Threshold& threshold) {
  SpectralData out;
  const auto s = ascending_values.size();
  out.eigenvalues = ascending_values.reverse();
  out.eigenvectors = ascending_vectors.rowwise().reverse();
  out.threshold = threshold;
  out.threshold_used = threshold.effective(s > 0 ? out.eigenvalues[0] : 0.0);
  out.numerical_rank = static_cast<int>((out.eigenvalues.array() > out.threshold_used).count());
  return out;
}

}  // namespace

SpectralData spectral(const Eigen::MatrixXd& symmetric, const Threshold& threshold) {
  if (symmetric.rows() != symmetric.cols()) throw std::invalid_argument("spectral: matrix is not square");
  if (!symmetric.allFinite()) throw std::invalid_argument("spectral: non-finite matrix entry");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  if (solver.info() != Eigen::Success) throw NumericalError("spectral: symmetric eigensolver did not converge");
  return finish_spectral(solver.eigenvalues(), solver.eigenvectors(), threshold);
}

SpectralData spectral(const MomentMatrix& m, const Threshold& threshold) { return spectral(m.entries, threshold); }

DesignFactorization::DesignFactorization(const Eigen::MatrixXd& design, Normalization normalization)
    : rows_(static_cast<std::size_t>(design.rows())), normalization_(normalization) {
  if (design.rows() == 0 || design.cols() == 0) throw std::invalid_argument("DesignFactorization: empty design");
  if (!design.allFinite()) throw std::invalid_argument("DesignFactorization: non-finite entry");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
  const auto k = std::min(design.rows(), design.cols());
  r_ = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

SpectralData DesignFactorization::spectral(std::size_t leading_cols, const Threshold& threshold) const {
  const auto s = static_cast<Eigen::Index>(leading_cols);
  if (s < 1 || s > r_.cols()) throw std::invalid_argument("DesignFactorization: column count out of range");
  const auto k = std::min<Eigen::Index>(r_.rows(), s);
  const Eigen::MatrixXd block = r_.topLeftCorner(k, s);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(block, Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw NumericalError("spectral_from_design: SVD did not converge");
  const double scale = normalization_ == Normalization::MeanOverN ? 1.0 / static_cast<double>(rows_) : 1.0;
  // singular values come sorted non-increasing; pad with zeros when n < s
  Eigen::VectorXd values = Eigen::VectorXd::Zero(s);
  const auto& sv = svd.singularValues();
  for (Eigen::Index j = 0; j < sv.size(); ++j) values[j] = sv[j] * sv[j] * scale;

  SpectralData out;
  out.eigenvalues = values;
  out.eigenvectors = svd.matrixV();
  out.threshold = threshold;
  out.threshold_used = threshold.effective(values[0]);
  out.numerical_rank = static_cast<int>((values.array() > out.threshold_used).count());
  return out;
}

SpectralData spectral_from_design(const Eigen::MatrixXd& design, Normalization normalization,
                                  const Threshold& threshold) {
  return DesignFactorization(design, normalization).spectral(static_cast<std::size_t>(design.cols()), threshold);
}

std::vector<Eigen::VectorXd> kernel_basis(const SpectralData& spec) {
  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index j = spec.numerical_rank; j < spec.eigenvalues.size(); ++j) {
    out.emplace_back(spec.eigenvectors.col(j));
  }
  return out;
}

}  // namespace christoffel
