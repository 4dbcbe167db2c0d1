#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "christoffel/parallel.hpp"
#include "christoffel/rng.hpp"

using namespace christoffel;

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
    CHECK(x != d.next_u64());
  }
}

TEST_CASE("uniform draws stay in the open unit interval with the right moments") {
  RandomStream r(1, 0);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sq += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sq / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("normal draws have unit variance") {
  RandomStream r(2, 9);
  double sum = 0.0, sq = 0.0, quart = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
    quart += z * z * z * z;
  }
  CHECK(std::abs(sum / n) < 4 / std::sqrt(double(n)));
  CHECK(std::abs(sq / n - 1.0) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(quart / n - 3.0) < 0.1);
}

TEST_CASE("parallel_for covers every index exactly once") {
  for (std::size_t n : {0u, 1u, 255u, 256u, 10007u}) {
    std::vector<int> hits(n, 0);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) ++hits[i];
    }, 16);
    for (int h : hits) CHECK(h == 1);
  }
  CHECK(thread_count() >= 1);
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(parallel_for(10000, [](std::size_t b, std::size_t e) {
    if (b <= 5000 && 5000 < e) throw std::runtime_error("boom");
  }, 16), std::runtime_error);
}
