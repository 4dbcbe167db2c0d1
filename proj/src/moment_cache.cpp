#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "christoffel/errors.hpp"
#include "christoffel/moments.hpp"

// Layout (all integers and floats little-endian):
//   "CMOM1"                      5 bytes
//   p, d, n                      uint64 each
//   basis kind                   uint8 (0 monomial, 1 tensor Chebyshev)
//   normalization                uint8 (0 mean over n, 1 sum)
//   scale box                    p pairs of float64 (lo, hi)
//   s                            uint64, must equal C(p+d, d)
//   entries                      s*s float64, row-major

namespace christoffel {

namespace {

constexpr std::array<char, 5> kMagic{'C', 'M', 'O', 'M', '1'};

template <typename T>
void put(std::ostream& os, T value) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::string& path) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw IoError("moment cache '" + path + "': truncated file");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

}  // namespace

void write_moment_cache(const std::string& path, const MomentMatrix& m) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os.write(kMagic.data(), kMagic.size());
  put<std::uint64_t>(os, static_cast<std::uint64_t>(m.basis.ambient_dim()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(m.degree()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(m.sample_count));
  put<std::uint8_t>(os, m.basis.kind() == BasisKind::Monomial ? 0 : 1);
  put<std::uint8_t>(os, m.normalization == Normalization::MeanOverN ? 0 : 1);
  for (const auto& iv : m.basis.scale_box()) {
    put<double>(os, iv.lo);
    put<double>(os, iv.hi);
  }
  const auto s = static_cast<Eigen::Index>(m.size());
  put<std::uint64_t>(os, static_cast<std::uint64_t>(s));
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) put<double>(os, m.entries(i, j));
  }
  if (!os) throw IoError("write to '" + path + "' failed");
}

MomentMatrix read_moment_cache(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  std::array<char, 5> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) {
    throw IoError("moment cache '" + path + "': bad magic bytes");
  }
  const auto p = get<std::uint64_t>(is, path);
  const auto d = get<std::uint64_t>(is, path);
  const auto n = get<std::uint64_t>(is, path);
  const auto kind = get<std::uint8_t>(is, path);
  const auto norm = get<std::uint8_t>(is, path);
  if (p < 1 || p > 64 || d > 1000 || kind > 1 || norm > 1) {
    throw IoError("moment cache '" + path + "': corrupt header");
  }
  ScaleBox box(p);
  for (auto& iv : box) {
    iv.lo = get<double>(is, path);
    iv.hi = get<double>(is, path);
  }
  const auto s = get<std::uint64_t>(is, path);
  if (s != basis_size(static_cast<int>(p), static_cast<int>(d))) {
    throw IoError("moment cache '" + path + "': size does not match p and d");
  }

  MomentMatrix m;
  const auto basis_kind = kind == 0 ? BasisKind::Monomial : BasisKind::TensorChebyshev;
  m.basis = GradedBasis::enumerate(static_cast<int>(p), static_cast<int>(d), basis_kind, box);
  m.sample_count = n;
  m.normalization = norm == 0 ? Normalization::MeanOverN : Normalization::Sum;
  m.entries.resize(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
  for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.entries.cols(); ++j) m.entries(i, j) = get<double>(is, path);
  }
  return m;
}

}  // namespace christoffel
