#pragma once

#include <cstdint>

namespace christoffel {

/// Counter-based random stream.
///
/// Draw k of stream s under seed is a pure function of (seed, s, k), so any
/// partition of the work across threads reproduces the same values. Samplers
/// use one stream per output point.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

}  // namespace christoffel
