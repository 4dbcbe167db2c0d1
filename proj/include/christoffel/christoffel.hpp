#pragma once

#include <span>
#include <utility>

#include <Eigen/Dense>

#include "christoffel/moments.hpp"
#include "christoffel/polybasis.hpp"

namespace christoffel {

/// Default tolerance on the normalized kernel residual that separates
/// on-support points (positive Christoffel value) from points whose basis
/// vector meets the numerical kernel.
inline constexpr double kDefaultKernelTol = 1e-6;

struct LambdaValue {
  /// 1 / (v^T M^+ v) when kernel_residual <= kernel_tol, else 0.
  double value = 0.0;
  /// 1 / (v^T M^+ v) regardless of the kernel component.
  double pinv_value = 0.0;
  /// |proj_ker(M) v| / |v|, in [0, 1].
  double kernel_residual = 0.0;
  bool on_support() const { return value > 0.0; }
};

/// Christoffel-Darboux kernel and Christoffel function of a (possibly
/// singular) moment matrix, evaluated through its spectral factorization.
class ChristoffelEvaluator {
 public:
  ChristoffelEvaluator(SpectralData spectral, GradedBasis basis, double kernel_tol = kDefaultKernelTol);

  static ChristoffelEvaluator from_moments(const MomentMatrix& m, const Threshold& threshold = {},
                                           double kernel_tol = kDefaultKernelTol);

  const SpectralData& spectral() const { return spectral_; }
  const GradedBasis& basis() const { return basis_; }
  const Eigen::VectorXd& pinv_eigenvalues() const { return pinv_eigenvalues_; }
  int rank() const { return spectral_.numerical_rank; }
  double kernel_tol() const { return kernel_tol_; }

  /// kappa(x, y) = v(x)^T M^+ v(y).
  double kernel(std::span<const double> x, std::span<const double> y) const;
  double kernel_from_vectors(const Eigen::VectorXd& vx, const Eigen::VectorXd& vy) const;

  LambdaValue lambda(std::span<const double> x) const;
  LambdaValue lambda_from_vector(const Eigen::VectorXd& v) const;

  /// Values at x of the orthonormal polynomials P_j = u_j / sqrt(lambda_j), j < rank.
  Eigen::VectorXd orthonormal_values(std::span<const double> x) const;

 private:
  SpectralData spectral_;
  GradedBasis basis_;
  double kernel_tol_;
  Eigen::VectorXd pinv_eigenvalues_;
  Eigen::MatrixXd whitened_;  // rank x s, rows u_j^T / sqrt(lambda_j)
  Eigen::MatrixXd kernel_vectors_;  // s x (s - rank)
};

/// Minimum of p^T M p subject to p^T v = 1, obtained by solving the KKT system
/// of the ridge-regularized problem M + l I for l = 10^-1 ... 10^-8 and
/// extrapolating to l = 0. Independent of the spectral path; meant for tests
/// and matrices of size <= 200. Throws NumericalError if the extrapolation
/// does not settle.
double lambda_variational_oracle(const Eigen::MatrixXd& m, const Eigen::VectorXd& v);
double lambda_variational_oracle(const MomentMatrix& m, std::span<const double> x);

/// Christoffel value at x of M + l A through the pseudo-inverse path. A must be
/// symmetric positive semidefinite and l >= 0.
double perturbed_lambda(const MomentMatrix& m, const Eigen::MatrixXd& a, double l, std::span<const double> x,
                        const Threshold& threshold = {}, double kernel_tol = kDefaultKernelTol);

/// Radial bump Q(y) = R(|y|), R(t) = T_d(1 + delta^2 - t^2) / T_d(1 + delta^2).
/// Total degree 2d; Q(0) = 1, |Q| <= 1 on the unit ball and
/// |Q| <= 2^(1 - delta d) on the annulus delta <= |y| <= 1.
class NeedlePolynomial {
 public:
  NeedlePolynomial(int d, double delta);

  int degree_parameter() const { return degree_; }
  double delta() const { return delta_; }
  int total_degree() const { return 2 * degree_; }
  /// R(t) = scale * T_d(shift - t^2).
  double shift() const { return shift_; }
  double scale() const { return scale_; }

  double radial(double t) const;
  double operator()(std::span<const double> y) const;

 private:
  int degree_;
  double delta_;
  double shift_;
  double scale_;
};

struct SupNormCheck {
  double lhs = 0.0;  // max_i P(x_i)^2
  double rhs = 0.0;  // max_i kappa(x_i, x_i) * mean_i P(x_i)^2
  bool holds() const { return lhs <= rhs * (1.0 + 1e-9); }
};

/// Sup-norm bound of a degree <= d polynomial on the sample by its empirical
/// L2 norm times the kernel diagonal. `coeffs` are in the evaluator's basis.
SupNormCheck supnorm_bound_check(const ChristoffelEvaluator& ev, const PointCloud& cloud,
                                 const Eigen::VectorXd& coeffs);

}  // namespace christoffel
