#include "christoffel/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "christoffel/parallel.hpp"
#include "christoffel/rng.hpp"

namespace christoffel {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::Cube: return "cube";
    case SurfaceKind::Sphere: return "sphere";
    case SurfaceKind::Torus: return "torus";
    case SurfaceKind::TVScreen: return "tvscreen";
    case SurfaceKind::Circle: return "circle";
    case SurfaceKind::BiTorus: return "bitorus";
  }
  return "unknown";
}

SurfaceKind surface_kind_from_string(const std::string& name) {
  if (name == "cube") return SurfaceKind::Cube;
  if (name == "sphere") return SurfaceKind::Sphere;
  if (name == "torus") return SurfaceKind::Torus;
  if (name == "tvscreen" || name == "tv-screen") return SurfaceKind::TVScreen;
  if (name == "circle") return SurfaceKind::Circle;
  if (name == "bitorus" || name == "bi-torus") return SurfaceKind::BiTorus;
  throw std::invalid_argument("unknown surface '" + name + "'");
}

double membership_residual(const SurfaceSpec& spec, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(spec.ambient_dim)) {
    throw std::invalid_argument("membership_residual: point dimension mismatch");
  }
  switch (spec.kind) {
    case SurfaceKind::Cube: {
      double out = 0.0;
      for (double c : x) out = std::max(out, std::abs(c) - 1.0);
      return out;
    }
    case SurfaceKind::Sphere:
    case SurfaceKind::Circle: {
      double r2 = 0.0;
      for (double c : x) r2 += c * c;
      return std::abs(r2 - 1.0);
    }
    case SurfaceKind::Torus: {
      const double big2 = spec.major_radius * spec.major_radius;
      const double small2 = spec.minor_radius * spec.minor_radius;
      const double rho2 = x[0] * x[0] + x[1] * x[1];
      const double a = rho2 + x[2] * x[2] + big2 - small2;
      return std::abs(a * a - 4.0 * big2 * rho2);
    }
    case SurfaceKind::TVScreen: {
      const double x2 = x[0] * x[0], y2 = x[1] * x[1], z2 = x[2] * x[2];
      return std::abs(x2 * x2 * x2 + y2 * y2 * y2 + z2 * z2 * z2 - 2.0 * x2 * y2 * z2 - 1.0);
    }
    case SurfaceKind::BiTorus:
      return std::max(std::abs(x[0] * x[0] + x[1] * x[1] - 1.0), std::abs(x[2] * x[2] + x[3] * x[3] - 1.0));
  }
  return 0.0;
}

double max_membership_residual(const SurfaceSpec& spec, const PointCloud& cloud) {
  double out = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) out = std::max(out, membership_residual(spec, cloud.point(i)));
  return out;
}

namespace {

void validate(const SurfaceSpec& spec) {
  switch (spec.kind) {
    case SurfaceKind::Cube:
    case SurfaceKind::Sphere:
      if (spec.ambient_dim < 1) throw std::invalid_argument("surface: ambient dimension must be >= 1");
      if (spec.kind == SurfaceKind::Sphere && spec.ambient_dim < 2) {
        throw std::invalid_argument("surface: sphere needs ambient dimension >= 2");
      }
      break;
    case SurfaceKind::Torus:
      if (spec.ambient_dim != 3 || !(spec.major_radius > spec.minor_radius && spec.minor_radius > 0.0)) {
        throw std::invalid_argument("surface: torus needs p = 3 and R > r > 0");
      }
      break;
    case SurfaceKind::TVScreen:
      if (spec.ambient_dim != 3) throw std::invalid_argument("surface: TV screen lives in R^3");
      break;
    case SurfaceKind::Circle:
      if (spec.ambient_dim != 2) throw std::invalid_argument("surface: circle lives in R^2");
      break;
    case SurfaceKind::BiTorus:
      if (spec.ambient_dim != 4) throw std::invalid_argument("surface: bi-torus lives in R^4");
      break;
  }
}

void sample_point(const SurfaceSpec& spec, RandomStream& rng, double* out) {
  const int p = spec.ambient_dim;
  switch (spec.kind) {
    case SurfaceKind::Cube:
      for (int j = 0; j < p; ++j) out[j] = rng.uniform(-1.0, 1.0);
      return;
    case SurfaceKind::Sphere: {
      double r2 = 0.0;
      do {
        r2 = 0.0;
        for (int j = 0; j < p; ++j) {
          out[j] = rng.normal();
          r2 += out[j] * out[j];
        }
      } while (r2 < 1e-300);
      const double inv = 1.0 / std::sqrt(r2);
      for (int j = 0; j < p; ++j) out[j] *= inv;
      return;
    }
    case SurfaceKind::Torus: {
      const double big = spec.major_radius;
      const double small = spec.minor_radius;
      // area element is proportional to (R + r cos theta)
      double theta = 0.0;
      do {
        theta = rng.uniform(0.0, kTwoPi);
      } while (rng.uniform() * (big + small) > big + small * std::cos(theta));
      const double phi = rng.uniform(0.0, kTwoPi);
      const double rho = big + small * std::cos(theta);
      out[0] = rho * std::cos(phi);
      out[1] = rho * std::sin(phi);
      out[2] = small * std::sin(theta);
      return;
    }
    case SurfaceKind::TVScreen: {
      SurfaceSpec s2 = SurfaceSpec::sphere(3);
      double u[3];
      sample_point(s2, rng, u);
      const double a = u[0] * u[0], b = u[1] * u[1], c = u[2] * u[2];
      const double t = std::pow(a * a * a + b * b * b + c * c * c - 2.0 * a * b * c, -1.0 / 6.0);
      for (int j = 0; j < 3; ++j) out[j] = t * u[j];
      return;
    }
    case SurfaceKind::Circle: {
      const double theta = rng.uniform(0.0, kTwoPi);
      out[0] = std::cos(theta);
      out[1] = std::sin(theta);
      return;
    }
    case SurfaceKind::BiTorus: {
      const double phi = rng.uniform(0.0, kTwoPi);
      const double psi = rng.uniform(0.0, kTwoPi);
      out[0] = std::cos(phi);
      out[1] = std::sin(phi);
      out[2] = std::cos(psi);
      out[3] = std::sin(psi);
      return;
    }
  }
}

}  // namespace

PointCloud sample(const SurfaceSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  validate(spec);
  PointMatrix pts(static_cast<Eigen::Index>(n), spec.ambient_dim);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RandomStream rng(seed, i);
      sample_point(spec, rng, pts.data() + i * static_cast<std::size_t>(spec.ambient_dim));
    }
  });
  return PointCloud(std::move(pts));
}

PointCloud sample_with_density(const SurfaceSpec& spec, const std::function<double(std::span<const double>)>& f,
                               double f_max, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_with_density: n must be >= 1");
  if (!(f_max > 0.0) || !std::isfinite(f_max)) throw std::invalid_argument("sample_with_density: f_max must be positive");
  if (spec.kind == SurfaceKind::TVScreen) {
    throw std::invalid_argument("sample_with_density: the TV screen sampler is not area-uniform");
  }
  validate(spec);
  const auto p = static_cast<std::size_t>(spec.ambient_dim);
  PointMatrix pts(static_cast<Eigen::Index>(n), spec.ambient_dim);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RandomStream rng(seed, i);
      double* out = pts.data() + i * p;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 1000000) throw std::invalid_argument("sample_with_density: acceptance rate too low");
        sample_point(spec, rng, out);
        const double fx = f(std::span<const double>(out, p));
        if (fx > f_max * (1.0 + 1e-12)) throw std::invalid_argument("sample_with_density: f exceeds f_max");
        if (rng.uniform() * f_max <= fx) break;
      }
    }
  });
  return PointCloud(std::move(pts));
}

PointCloud embed_angles(const PointMatrix& angles, SurfaceKind target) {
  Eigen::Index arity = 0;
  if (target == SurfaceKind::Circle) {
    arity = 1;
  } else if (target == SurfaceKind::BiTorus) {
    arity = 2;
  } else {
    throw std::invalid_argument("embed_angles: target must be circle or bitorus");
  }
  if (angles.cols() != arity) {
    throw std::invalid_argument("embed_angles: " + to_string(target) + " expects " + std::to_string(arity) +
                                " angle column(s), got " + std::to_string(angles.cols()));
  }
  PointMatrix pts(angles.rows(), 2 * arity);
  for (Eigen::Index i = 0; i < angles.rows(); ++i) {
    for (Eigen::Index k = 0; k < arity; ++k) {
      pts(i, 2 * k) = std::cos(angles(i, k));
      pts(i, 2 * k + 1) = std::sin(angles(i, k));
    }
  }
  return PointCloud(std::move(pts));
}

EvaluationGrid make_grid(const SurfaceSpec& spec, int first, int second) {
  EvaluationGrid g;
  g.kind = spec.kind;
  switch (spec.kind) {
    case SurfaceKind::Circle: {
      if (first < 2) throw std::invalid_argument("make_grid: resolution must be >= 2");
      g.parameter_names = {"theta"};
      g.rows = 1;
      g.cols = first;
      g.parameters.resize(first, 1);
      g.points.resize(first, 2);
      for (int k = 0; k < first; ++k) {
        const double theta = kTwoPi * k / first;
        g.parameters(k, 0) = theta;
        g.points(k, 0) = std::cos(theta);
        g.points(k, 1) = std::sin(theta);
      }
      return g;
    }
    case SurfaceKind::Sphere: {
      if (spec.ambient_dim != 3) throw std::invalid_argument("make_grid: sphere grids need p = 3");
      if (first < 2 || second < 2) throw std::invalid_argument("make_grid: resolution must be >= 2 per parameter");
      g.parameter_names = {"longitude", "latitude"};
      g.cols = first;
      g.rows = second;
      g.parameters.resize(first * second, 2);
      g.points.resize(first * second, 3);
      for (int i = 0; i < second; ++i) {
        const double lat = -kPi / 2.0 + kPi * (i + 0.5) / second;
        for (int j = 0; j < first; ++j) {
          const double lon = -kPi + kTwoPi * j / first;
          const int k = i * first + j;
          g.parameters(k, 0) = lon;
          g.parameters(k, 1) = lat;
          g.points(k, 0) = std::cos(lat) * std::cos(lon);
          g.points(k, 1) = std::cos(lat) * std::sin(lon);
          g.points(k, 2) = std::sin(lat);
        }
      }
      return g;
    }
    case SurfaceKind::BiTorus: {
      if (first < 2 || second < 2) throw std::invalid_argument("make_grid: resolution must be >= 2 per parameter");
      g.parameter_names = {"phi", "psi"};
      g.rows = first;
      g.cols = second;
      g.parameters.resize(first * second, 2);
      g.points.resize(first * second, 4);
      for (int i = 0; i < first; ++i) {
        const double phi = kTwoPi * i / first;
        for (int j = 0; j < second; ++j) {
          const double psi = kTwoPi * j / second;
          const int k = i * second + j;
          g.parameters(k, 0) = phi;
          g.parameters(k, 1) = psi;
          g.points(k, 0) = std::cos(phi);
          g.points(k, 1) = std::sin(phi);
          g.points(k, 2) = std::cos(psi);
          g.points(k, 3) = std::sin(psi);
        }
      }
      return g;
    }
    default:
      throw std::invalid_argument("make_grid: grids exist for circle, sphere and bitorus only");
  }
}

}  // namespace christoffel
