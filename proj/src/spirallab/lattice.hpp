#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace spirallab::lattice {

// Every lattice enumeration in the project walks {0..n}^m in row-major
// order with the first coordinate slowest, so tensors, point clouds and
// spiral nets line up index-for-index.

[[nodiscard]] inline std::size_t pow_checked(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > (std::size_t{1} << 40) / base) {
      throw std::invalid_argument("lattice: (n+1)^m exceeds the supported size");
    }
    out *= base;
  }
  return out;
}

[[nodiscard]] inline std::size_t linear_index(std::span<const std::size_t> k, std::size_t n) {
  std::size_t lin = 0;
  for (std::size_t v : k) {
    if (v > n) throw std::out_of_range("lattice: multi-index component exceeds n");
    lin = lin * (n + 1) + v;
  }
  return lin;
}

inline void decode(std::size_t lin, std::size_t n, std::span<std::size_t> out) {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = lin % (n + 1);
    lin /= (n + 1);
  }
}

// Odometer step matching the row-major order; returns false after the last
// index n*1.
inline bool advance(std::span<std::size_t> k, std::size_t n) {
  for (std::size_t i = k.size(); i-- > 0;) {
    if (k[i] < n) {
      ++k[i];
      for (std::size_t j = i + 1; j < k.size(); ++j) k[j] = 0;
      return true;
    }
  }
  return false;
}

}  // namespace spirallab::lattice
