#include <doctest.h>

#include <cmath>

#include "christoffel/christoffel.hpp"
#include "christoffel/perturbation.hpp"

using namespace christoffel;

namespace {

std::vector<double> seed_averaged_deviation(int d, const std::vector<double>& sigmas, std::size_t n) {
  const auto circle = SurfaceSpec::circle();
  const auto grid = make_grid(circle, 256);
  std::vector<double> out(sigmas.size(), 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const NoiseLadder ladder{sample(circle, n, seed), sigmas, seed};
    const auto sweep = noise_sweep(ladder, circle, d, grid);
    for (std::size_t i = 0; i < sigmas.size(); ++i) out[i] += sweep.levels[i].deviation / 5.0;
  }
  return out;
}

}  // namespace

TEST_CASE("noise ladder validation") {
  const auto base = sample(SurfaceSpec::circle(), 10, 1);
  CHECK_NOTHROW(NoiseLadder{base, {0.2, 0.1, 0.0}, 1}.validate());
  CHECK_THROWS_AS(NoiseLadder({base, {}, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(NoiseLadder({base, {0.1, 0.2}, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(NoiseLadder({base, {0.1, 0.1}, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(NoiseLadder({base, {0.1, -0.1}, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(NoiseLadder({base, {NAN}, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(NoiseLadder({base, {INFINITY, 1.0}, 1}).validate(), std::invalid_argument);
}

TEST_CASE("perturbing a cloud") {
  const auto base = sample(SurfaceSpec::sphere(3), 100000, 2);
  CHECK(perturb_cloud(base, 0.0, 5).points() == base.points());
  const auto a = perturb_cloud(base, 0.05, 5);
  CHECK(a.points() == perturb_cloud(base, 0.05, 5).points());
  CHECK(a.points() != perturb_cloud(base, 0.05, 6).points());
  // Same normals at every level of one seed.
  const PointMatrix e1 = (a.points() - base.points()) / 0.05;
  const PointMatrix e2 = (perturb_cloud(base, 0.2, 5).points() - base.points()) / 0.2;
  CHECK((e1 - e2).cwiseAbs().maxCoeff() <= 1e-9);

  const double n = static_cast<double>(e1.size());
  const double mean = e1.sum() / n;
  const double var = e1.array().square().sum() / n - mean * mean;
  CHECK(std::abs(mean) <= 4 / std::sqrt(n));
  CHECK(std::abs(var - 1.0) <= 4 * std::sqrt(2.0 / n));
  CHECK_THROWS_AS(perturb_cloud(base, -1.0, 1), std::invalid_argument);
}

TEST_CASE("perturbed moment matrices stay positive semidefinite") {
  const auto base = sample(SurfaceSpec::circle(), 4000, 3);
  const auto box = bounding_box(base.points());
  for (double sigma : {0.2, 0.05, 1e-3}) {
    const auto m = moment_matrix(perturb_cloud(base, sigma, 3), GradedBasis::enumerate(2, 6, BasisKind::TensorChebyshev, box));
    const auto s = spectral(m);
    CHECK(s.eigenvalues.minCoeff() >= -1e-10 * s.eigenvalues(0));
  }
}

TEST_CASE("noise sweep bookkeeping") {
  const auto circle = SurfaceSpec::circle();
  const auto grid = make_grid(circle, 128);
  const auto base = sample(circle, 5000, 4);
  const NoiseLadder ladder{base, {0.1, 0.01, 0.0}, 9};
  const auto sweep = noise_sweep(ladder, circle, 4, grid);
  REQUIRE(sweep.levels.size() == 3);
  CHECK(sweep.levels[0].sigma == 0.1);
  CHECK(sweep.levels[2].deviation == 0.0);
  CHECK(sweep.levels[2].grid.lambda_pinv == sweep.reference.lambda_pinv);
  CHECK(sweep.levels[0].deviation > 0.0);
  CHECK(sweep.reference.rank == 9);
  CHECK(sweep.levels[0].grid.rank == 15);

  const auto direct = estimate_density(base, circle, 4, grid);
  CHECK(direct.lambda_pinv == sweep.reference.lambda_pinv);
  for (const auto& level : sweep.levels) {
    for (double v : level.grid.values) CHECK(v >= 0.0);
    for (double v : level.grid.lambda_pinv) CHECK(v > 0.0);
  }

  const auto again = noise_sweep(ladder, circle, 4, grid);
  for (std::size_t i = 0; i < 3; ++i) CHECK(again.levels[i].deviation == sweep.levels[i].deviation);
  CHECK_THROWS_AS(noise_sweep(NoiseLadder{base, {}, 1}, circle, 4, grid), std::invalid_argument);
}

TEST_CASE("single zero noise level gives zero deviation") {
  const auto circle = SurfaceSpec::circle();
  const NoiseLadder ladder{sample(circle, 2000, 1), {0.0}, 3};
  CHECK(noise_sweep(ladder, circle, 6, make_grid(circle, 64)).levels[0].deviation == 0.0);
}

TEST_CASE("noise vanishing recovers the noiseless function when the kernel vanishes to first order") {
  // Up to degree 3 the kernel is (x^2 + y^2 - 1) times linear polynomials.
  const auto dev = seed_averaged_deviation(3, {0.2, 0.1, 0.05, 0.01}, 20000);
  for (std::size_t i = 1; i < dev.size(); ++i) CHECK(dev[i] < dev[i - 1]);
  CHECK(dev.back() < 0.25 * dev.front());
}

TEST_CASE("from degree 4 the noisy limit differs from the noiseless function") {
  // (x^2 + y^2 - 1)^2 q has eigenvalue O(sigma^4) but O(sigma^2) cross moments,
  // so the deviation stays of order one as sigma decreases.
  const auto dev = seed_averaged_deviation(6, {0.2, 0.1, 0.05, 0.01}, 20000);
  for (double d : dev) CHECK(d > 0.01);
  CHECK(dev.back() > 0.5 * dev.front());
}
