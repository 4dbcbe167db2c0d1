#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace christoffel {

/// Binomial coefficient C(n, k); zero when k < 0 or k > n.
std::uint64_t binomial(long n, long k);

/// Number of p-variate monomials of total degree at most d, C(p+d, d).
std::size_t basis_size(int p, int d);

/// Exponent vector of a monomial or tensor Chebyshev term.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);

  const std::vector<int>& exponents() const { return exponents_; }
  int degree() const { return degree_; }
  std::size_t size() const { return exponents_.size(); }
  int operator[](std::size_t i) const { return exponents_[i]; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

/// Graded lexicographic comparison with x1 > x2 > ... > xp:
/// lower total degree first, then larger leading exponents first.
bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

enum class BasisKind { Monomial, TensorChebyshev };

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string& name);

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

using ScaleBox = std::vector<Interval>;

/// [-1, 1]^p.
ScaleBox identity_box(int p);

/// Coordinate-wise bounding box of the rows of `points`, each interval widened
/// by `pad` times its width on both sides. Degenerate coordinates get a unit
/// half-width around their value.
ScaleBox bounding_box(const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                           Eigen::RowMajor>>& points,
                      double pad = 0.01);

/// T_k(t), first-kind Chebyshev polynomial. Three-term recurrence on |t| <= 1,
/// closed form outside, parity for t < -1.
double chebyshev_T(int k, double t);

/// Recurrence-only evaluation, valid for every real t.
double chebyshev_T_recurrence(int k, double t);

/// Closed form 0.5 * ((t + sqrt(t^2 - 1))^k + (t + sqrt(t^2 - 1))^-k), requires t >= 1.
double chebyshev_T_closed_form(int k, double t);

/// Ordered graded basis of all p-variate terms up to total degree d.
///
/// Indices are sorted by graded lexicographic order, so the basis of degree
/// d' < d is the leading s(d') prefix of the degree-d basis. For the tensor
/// Chebyshev kind, coordinate i is mapped affinely from scale_box[i] onto
/// [-1, 1] before evaluation.
class GradedBasis {
 public:
  GradedBasis() = default;
  static GradedBasis enumerate(int p, int d, BasisKind kind = BasisKind::Monomial,
                               ScaleBox scale_box = {});

  int ambient_dim() const { return ambient_dim_; }
  int max_degree() const { return max_degree_; }
  BasisKind kind() const { return kind_; }
  const ScaleBox& scale_box() const { return scale_box_; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }

  /// Same kind and box, lower degree; a prefix of this basis.
  GradedBasis truncated(int d) const;

  /// Position of a multi-index in the ordering, or -1.
  long position(const MultiIndex& alpha) const;

  /// Basis vector v_d(x).
  Eigen::VectorXd evaluate(std::span<const double> x) const;
  void evaluate_into(std::span<const double> x, std::span<double> out) const;

  /// Coordinate of x after the affine map used by this basis.
  double rescale(int coord, double value) const;

 private:
  int ambient_dim_ = 0;
  int max_degree_ = 0;
  BasisKind kind_ = BasisKind::Monomial;
  ScaleBox scale_box_;
  std::vector<MultiIndex> indices_;
};

/// Re-expresses the polynomial sum_j coeffs[j] * basis_j(x) in the monomial
/// basis of the same p and d, in the original (unscaled) coordinates.
Eigen::VectorXd to_monomial_coefficients(const GradedBasis& basis, const Eigen::VectorXd& coeffs);

}  // namespace christoffel
