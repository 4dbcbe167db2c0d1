#include "christoffel/christoffel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "christoffel/errors.hpp"

namespace christoffel {

ChristoffelEvaluator::ChristoffelEvaluator(SpectralData spectral, GradedBasis basis, double kernel_tol)
    : spectral_(std::move(spectral)), basis_(std::move(basis)), kernel_tol_(kernel_tol) {
  const auto s = static_cast<Eigen::Index>(spectral_.size());
  if (static_cast<std::size_t>(s) != basis_.size()) {
    throw std::invalid_argument("ChristoffelEvaluator: spectral data and basis sizes differ");
  }
  if (!(kernel_tol_ >= 0.0)) throw std::invalid_argument("ChristoffelEvaluator: kernel_tol must be >= 0");
  const Eigen::Index r = spectral_.numerical_rank;
  pinv_eigenvalues_ = Eigen::VectorXd::Zero(s);
  whitened_.resize(r, s);
  for (Eigen::Index j = 0; j < r; ++j) {
    const double lam = spectral_.eigenvalues[j];
    pinv_eigenvalues_[j] = 1.0 / lam;
    whitened_.row(j) = spectral_.eigenvectors.col(j).transpose() / std::sqrt(lam);
  }
  kernel_vectors_ = spectral_.eigenvectors.rightCols(s - r);
}

ChristoffelEvaluator ChristoffelEvaluator::from_moments(const MomentMatrix& m, const Threshold& threshold,
                                                       double kernel_tol) {
  return ChristoffelEvaluator(christoffel::spectral(m, threshold), m.basis, kernel_tol);
}

double ChristoffelEvaluator::kernel_from_vectors(const Eigen::VectorXd& vx, const Eigen::VectorXd& vy) const {
  return (whitened_ * vx).dot(whitened_ * vy);
}

double ChristoffelEvaluator::kernel(std::span<const double> x, std::span<const double> y) const {
  return kernel_from_vectors(basis_.evaluate(x), basis_.evaluate(y));
}

LambdaValue ChristoffelEvaluator::lambda_from_vector(const Eigen::VectorXd& v) const {
  LambdaValue out;
  const double diag = (whitened_ * v).squaredNorm();
  const double vnorm = v.norm();
  out.kernel_residual = vnorm > 0.0 ? std::min(1.0, (kernel_vectors_.transpose() * v).norm() / vnorm) : 1.0;
  out.pinv_value = diag > 0.0 ? 1.0 / diag : std::numeric_limits<double>::infinity();
  out.value = (out.kernel_residual <= kernel_tol_ && diag > 0.0) ? out.pinv_value : 0.0;
  return out;
}

LambdaValue ChristoffelEvaluator::lambda(std::span<const double> x) const {
  return lambda_from_vector(basis_.evaluate(x));
}

Eigen::VectorXd ChristoffelEvaluator::orthonormal_values(std::span<const double> x) const {
  return whitened_ * basis_.evaluate(x);
}

namespace {

// Value at 0 of the polynomial interpolating (xs[i], ys[i]), Neville's scheme.
double extrapolate_to_zero(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> p(ys.begin(), ys.end());
  const auto n = p.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
    }
  }
  return p[0];
}

}  // namespace

double lambda_variational_oracle(const Eigen::MatrixXd& m, const Eigen::VectorXd& v) {
  const auto s = m.rows();
  if (m.cols() != s || v.size() != s) throw std::invalid_argument("lambda_variational_oracle: size mismatch");
  if (s > 200) throw std::invalid_argument("lambda_variational_oracle: restricted to matrices of size <= 200");
  if (v.norm() == 0.0) throw std::invalid_argument("lambda_variational_oracle: zero constraint vector");

  // ridge scale follows the magnitude of M so the sequence is unit-free
  const double scale = std::max(m.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  constexpr int kSteps = 8;
  std::array<double, kSteps> ls{};
  std::array<double, kSteps> fs{};
  for (int k = 0; k < kSteps; ++k) {
    const double l = std::pow(10.0, -(k + 1)) * scale;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
    const Eigen::MatrixXd reg = m + l * Eigen::MatrixXd::Identity(s, s);
    kkt.topLeftCorner(s, s) = 2.0 * reg;
    kkt.topRightCorner(s, 1) = v;
    kkt.bottomLeftCorner(1, s) = v.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
    rhs[s] = 1.0;
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    const Eigen::VectorXd p = sol.head(s);
    ls[k] = l;
    fs[k] = p.dot(reg * p);
    if (!std::isfinite(fs[k])) throw NumericalError("lambda_variational_oracle: KKT solve failed");
  }

  const std::span<const double> lspan(ls);
  const std::span<const double> fspan(fs);
  const double fine = extrapolate_to_zero(lspan.last(4), fspan.last(4));
  const double coarse = extrapolate_to_zero(lspan.last(3), fspan.last(3));
  const double last = fs[kSteps - 1];
  const double ref = std::max(std::abs(fine), last);
  if (std::abs(fine - coarse) > 1e-6 * ref) {
    throw NumericalError("lambda_variational_oracle: ridge continuation did not converge");
  }
  // kernel branch: f(l) ~ l / |proj_ker v|^2 extrapolates to roundoff
  if (std::abs(fine) <= 1e-6 * last) return 0.0;
  return std::max(fine, 0.0);
}

double lambda_variational_oracle(const MomentMatrix& m, std::span<const double> x) {
  return lambda_variational_oracle(m.entries, m.basis.evaluate(x));
}

double perturbed_lambda(const MomentMatrix& m, const Eigen::MatrixXd& a, double l, std::span<const double> x,
                        const Threshold& threshold, double kernel_tol) {
  if (a.rows() != m.entries.rows() || a.cols() != m.entries.cols()) {
    throw std::invalid_argument("perturbed_lambda: perturbation size mismatch");
  }
  if (!(l >= 0.0)) throw std::invalid_argument("perturbed_lambda: l must be >= 0");
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  const double amax = a.cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(amax, 1.0)) throw std::invalid_argument("perturbed_lambda: A is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("perturbed_lambda: eigensolver failed on A");
  const auto& ev = solver.eigenvalues();
  if (ev.size() > 0 && ev[0] < -1e-10 * std::max(std::abs(ev[ev.size() - 1]), 1.0)) {
    throw std::invalid_argument("perturbed_lambda: A is not positive semidefinite");
  }
  MomentMatrix shifted = m;
  shifted.entries = m.entries + l * a;
  return ChristoffelEvaluator::from_moments(shifted, threshold, kernel_tol).lambda(x).value;
}

NeedlePolynomial::NeedlePolynomial(int d, double delta) : degree_(d), delta_(delta) {
  if (d < 1) throw std::invalid_argument("needle: degree parameter must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("needle: delta must lie in (0, 1)");
  shift_ = 1.0 + delta * delta;
  scale_ = 1.0 / chebyshev_T(d, shift_);
}

double NeedlePolynomial::radial(double t) const {
  return scale_ * chebyshev_T(degree_, shift_ - t * t);
}

double NeedlePolynomial::operator()(std::span<const double> y) const {
  double r2 = 0.0;
  for (double c : y) r2 += c * c;
  return radial(std::sqrt(r2));
}

SupNormCheck supnorm_bound_check(const ChristoffelEvaluator& ev, const PointCloud& cloud,
                                 const Eigen::VectorXd& coeffs) {
  if (static_cast<std::size_t>(coeffs.size()) != ev.basis().size()) {
    throw std::invalid_argument("supnorm_bound_check: coefficient length mismatch");
  }
  SupNormCheck out;
  double mean_sq = 0.0;
  double max_kappa = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::VectorXd v = ev.basis().evaluate(cloud.point(i));
    const double pv = coeffs.dot(v);
    out.lhs = std::max(out.lhs, pv * pv);
    mean_sq += pv * pv;
    max_kappa = std::max(max_kappa, ev.kernel_from_vectors(v, v));
  }
  mean_sq /= static_cast<double>(cloud.size());
  out.rhs = max_kappa * mean_sq;
  return out;
}

}  // namespace christoffel
