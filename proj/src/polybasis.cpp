#include "christoffel/polybasis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace christoffel {

std::uint64_t binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (long i = 1; i <= k; ++i) {
    // exact at every step: r * (n - k + i) is divisible by i
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

std::size_t basis_size(int p, int d) {
  if (p < 1 || d < 0) return 0;
  return static_cast<std::size_t>(binomial(p + d, d));
}

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
  }
  degree_ = std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  // x1 > x2 > ...: the index with the larger first differing exponent comes first
  return std::lexicographical_compare(b.exponents().begin(), b.exponents().end(),
                                      a.exponents().begin(), a.exponents().end());
}

std::string to_string(BasisKind kind) {
  return kind == BasisKind::Monomial ? "monomial" : "chebyshev";
}

BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "monomial") return BasisKind::Monomial;
  if (name == "chebyshev" || name == "tensor-chebyshev") return BasisKind::TensorChebyshev;
  throw std::invalid_argument("unknown basis kind '" + name + "' (expected monomial|chebyshev)");
}

ScaleBox identity_box(int p) { return ScaleBox(static_cast<std::size_t>(p), Interval{-1.0, 1.0}); }

ScaleBox bounding_box(
    const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>& points,
    double pad) {
  if (points.rows() == 0) throw std::invalid_argument("bounding_box: empty point set");
  ScaleBox box(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const double lo = points.col(j).minCoeff();
    const double hi = points.col(j).maxCoeff();
    const double width = hi - lo;
    if (width <= 1e-12 * std::max(1.0, std::abs(lo))) {
      box[j] = {lo - 1.0, hi + 1.0};
    } else {
      box[j] = {lo - pad * width, hi + pad * width};
    }
  }
  return box;
}

double chebyshev_T_recurrence(int k, double t) {
  if (k < 0) throw std::invalid_argument("chebyshev_T: negative degree");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (int i = 1; i < k; ++i) {
    const double next = 2.0 * t * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double chebyshev_T_closed_form(int k, double t) {
  if (k < 0) throw std::invalid_argument("chebyshev_T: negative degree");
  if (t < 1.0) throw std::invalid_argument("chebyshev_T_closed_form: requires t >= 1");
  const double base = t + std::sqrt(t * t - 1.0);
  const double up = std::pow(base, k);
  return 0.5 * (up + 1.0 / up);
}

double chebyshev_T(int k, double t) {
  if (std::abs(t) <= 1.0) return chebyshev_T_recurrence(k, t);
  if (t > 1.0) return chebyshev_T_closed_form(k, t);
  const double v = chebyshev_T_closed_form(k, -t);
  return (k % 2 == 0) ? v : -v;
}

namespace {

void append_degree(int p, int remaining, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  const auto pos = prefix.size();
  if (pos + 1 == static_cast<std::size_t>(p)) {
    prefix.push_back(remaining);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    prefix.push_back(e);
    append_degree(p, remaining - e, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

GradedBasis GradedBasis::enumerate(int p, int d, BasisKind kind, ScaleBox scale_box) {
  if (p < 1) throw std::invalid_argument("enumerate_basis: ambient dimension must be >= 1");
  if (d < 0) throw std::invalid_argument("enumerate_basis: degree must be >= 0");

  GradedBasis b;
  b.ambient_dim_ = p;
  b.max_degree_ = d;
  b.kind_ = kind;
  if (kind == BasisKind::Monomial || scale_box.empty()) {
    b.scale_box_ = identity_box(p);
  } else {
    if (scale_box.size() != static_cast<std::size_t>(p)) {
      throw std::invalid_argument("enumerate_basis: scale box dimension mismatch");
    }
    for (const auto& iv : scale_box) {
      if (!(iv.hi > iv.lo) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
        throw std::invalid_argument("enumerate_basis: degenerate scale box interval");
      }
    }
    b.scale_box_ = std::move(scale_box);
  }

  b.indices_.reserve(basis_size(p, d));
  std::vector<int> prefix;
  prefix.reserve(static_cast<std::size_t>(p));
  for (int k = 0; k <= d; ++k) append_degree(p, k, prefix, b.indices_);
  return b;
}

GradedBasis GradedBasis::truncated(int d) const {
  if (d < 0 || d > max_degree_) throw std::invalid_argument("GradedBasis::truncated: degree out of range");
  GradedBasis b = *this;
  b.max_degree_ = d;
  b.indices_.resize(basis_size(ambient_dim_, d));
  return b;
}

long GradedBasis::position(const MultiIndex& alpha) const {
  if (alpha.size() != static_cast<std::size_t>(ambient_dim_) || alpha.degree() > max_degree_) return -1;
  const auto it = std::lower_bound(indices_.begin(), indices_.end(), alpha, graded_lex_less);
  if (it == indices_.end() || !(*it == alpha)) return -1;
  return static_cast<long>(it - indices_.begin());
}

double GradedBasis::rescale(int coord, double value) const {
  if (kind_ == BasisKind::Monomial) return value;
  const auto& iv = scale_box_[static_cast<std::size_t>(coord)];
  return (2.0 * value - iv.lo - iv.hi) / (iv.hi - iv.lo);
}

void GradedBasis::evaluate_into(std::span<const double> x, std::span<double> out) const {
  if (x.size() != static_cast<std::size_t>(ambient_dim_)) {
    throw std::invalid_argument("eval_basis_vector: point dimension mismatch");
  }
  if (out.size() != indices_.size()) throw std::invalid_argument("eval_basis_vector: output size mismatch");

  // table[i * (d+1) + k] holds the k-th univariate factor in coordinate i
  const int stride = max_degree_ + 1;
  std::vector<double> table(static_cast<std::size_t>(ambient_dim_ * stride));
  for (int i = 0; i < ambient_dim_; ++i) {
    double* row = table.data() + i * stride;
    const double t = rescale(i, x[static_cast<std::size_t>(i)]);
    row[0] = 1.0;
    if (max_degree_ >= 1) row[1] = t;
    for (int k = 2; k <= max_degree_; ++k) {
      row[k] = kind_ == BasisKind::Monomial ? row[k - 1] * t : 2.0 * t * row[k - 1] - row[k - 2];
    }
  }

  for (std::size_t j = 0; j < indices_.size(); ++j) {
    const auto& e = indices_[j].exponents();
    double v = 1.0;
    for (int i = 0; i < ambient_dim_; ++i) v *= table[static_cast<std::size_t>(i * stride + e[i])];
    out[j] = v;
  }
}

Eigen::VectorXd GradedBasis::evaluate(std::span<const double> x) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(indices_.size()));
  evaluate_into(x, std::span<double>(v.data(), static_cast<std::size_t>(v.size())));
  return v;
}

namespace {

// Coefficients (in powers of x) of T_k(a x + b) for k = 0..d.
std::vector<std::vector<double>> chebyshev_affine_coefficients(int d, double a, double b) {
  std::vector<std::vector<double>> c(static_cast<std::size_t>(d + 1));
  c[0] = {1.0};
  if (d >= 1) c[1] = {b, a};
  for (int k = 2; k <= d; ++k) {
    std::vector<double> next(static_cast<std::size_t>(k + 1), 0.0);
    const auto& p1 = c[static_cast<std::size_t>(k - 1)];
    const auto& p2 = c[static_cast<std::size_t>(k - 2)];
    for (std::size_t m = 0; m < p1.size(); ++m) {
      next[m] += 2.0 * b * p1[m];
      next[m + 1] += 2.0 * a * p1[m];
    }
    for (std::size_t m = 0; m < p2.size(); ++m) next[m] -= p2[m];
    c[static_cast<std::size_t>(k)] = std::move(next);
  }
  return c;
}

}  // namespace

Eigen::VectorXd to_monomial_coefficients(const GradedBasis& basis, const Eigen::VectorXd& coeffs) {
  if (static_cast<std::size_t>(coeffs.size()) != basis.size()) {
    throw std::invalid_argument("to_monomial_coefficients: coefficient length mismatch");
  }
  if (basis.kind() == BasisKind::Monomial) return coeffs;

  const int p = basis.ambient_dim();
  const int d = basis.max_degree();
  std::vector<std::vector<std::vector<double>>> factors;
  for (int i = 0; i < p; ++i) {
    const auto& iv = basis.scale_box()[static_cast<std::size_t>(i)];
    const double a = 2.0 / (iv.hi - iv.lo);
    const double b = -(iv.lo + iv.hi) / (iv.hi - iv.lo);
    factors.push_back(chebyshev_affine_coefficients(d, a, b));
  }

  const auto mono = GradedBasis::enumerate(p, d, BasisKind::Monomial);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mono.size()));

  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (coeffs[static_cast<Eigen::Index>(j)] == 0.0) continue;
    const auto& alpha = basis.indices()[j];
    // expand prod_i T_{alpha_i}(a_i x_i + b_i) by iterating over per-coordinate powers
    std::vector<int> m(static_cast<std::size_t>(p), 0);
    while (true) {
      double term = coeffs[static_cast<Eigen::Index>(j)];
      for (int i = 0; i < p; ++i) term *= factors[i][alpha[i]][m[i]];
      if (term != 0.0) {
        const auto pos = mono.position(MultiIndex(m));
        out[pos] += term;
      }
      int i = 0;
      while (i < p && m[i] == alpha[i]) m[i++] = 0;
      if (i == p) break;
      ++m[i];
    }
  }
  return out;
}

}  // namespace christoffel
