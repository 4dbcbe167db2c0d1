#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "christoffel/moments.hpp"

namespace christoffel {

enum class SurfaceKind { Cube, Sphere, Torus, TVScreen, Circle, BiTorus };

std::string to_string(SurfaceKind kind);
SurfaceKind surface_kind_from_string(const std::string& name);

/// Test sets. Torus(R, r) is the ring torus around the z axis,
/// (x^2 + y^2 + z^2 + R^2 - r^2)^2 = 4 R^2 (x^2 + y^2). TVScreen is
/// x^6 + y^6 + z^6 - 2 x^2 y^2 z^2 = 1. Circle lives in R^2 and BiTorus is
/// the product of two unit circles in R^4.
struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::Sphere;
  int ambient_dim = 3;
  double major_radius = 0.75;
  double minor_radius = 0.25;

  static SurfaceSpec cube(int p = 3) { return {SurfaceKind::Cube, p}; }
  static SurfaceSpec sphere(int p = 3) { return {SurfaceKind::Sphere, p}; }
  static SurfaceSpec torus(double big_r = 0.75, double small_r = 0.25) {
    return {SurfaceKind::Torus, 3, big_r, small_r};
  }
  static SurfaceSpec tv_screen() { return {SurfaceKind::TVScreen, 3}; }
  static SurfaceSpec circle() { return {SurfaceKind::Circle, 2}; }
  static SurfaceSpec bi_torus() { return {SurfaceKind::BiTorus, 4}; }
};

/// Largest absolute value of the defining equations at x; for the cube, the
/// distance by which x leaves [-1, 1]^p.
double membership_residual(const SurfaceSpec& spec, std::span<const double> x);

/// Maximum membership residual over a cloud.
double max_membership_residual(const SurfaceSpec& spec, const PointCloud& cloud);

/// Seed-deterministic sampler; point i uses random stream i.
PointCloud sample(const SurfaceSpec& spec, std::size_t n, std::uint64_t seed);

/// Rejection sampler for the probability density f with respect to the
/// normalized area measure. `f_max` must bound f on the surface. Not
/// available for the TV screen, whose base sampler is not area-uniform.
PointCloud sample_with_density(const SurfaceSpec& spec, const std::function<double(std::span<const double>)>& f,
                               double f_max, std::size_t n, std::uint64_t seed);

/// Circle: theta -> (cos, sin). BiTorus: (phi, psi) -> (cos phi, sin phi, cos psi, sin psi).
/// Rows of `angles` are tuples in radians.
PointCloud embed_angles(const PointMatrix& angles, SurfaceKind target);

struct EvaluationGrid {
  SurfaceKind kind = SurfaceKind::Circle;
  std::vector<std::string> parameter_names;
  PointMatrix parameters;  // one row of angles per grid point
  PointMatrix points;      // embedded coordinates
  int rows = 1;            // shape of 2-parameter grids
  int cols = 0;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(points.cols()), static_cast<std::size_t>(points.cols())};
  }
};

/// Circle: `first` uniform angles starting at 0. Sphere (p = 3):
/// equirectangular grid of `first` longitudes in [-pi, pi) by `second`
/// cell-centred latitudes. BiTorus: `first` x `second` uniform angle pairs.
EvaluationGrid make_grid(const SurfaceSpec& spec, int first, int second = 0);

}  // namespace christoffel
