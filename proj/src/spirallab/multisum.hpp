#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spirallab/increments.hpp"
#include "spirallab/metric_space.hpp"

namespace spirallab::multisum {

// (n+1)^m grid of d-vectors, stored row-major with the first lattice
// coordinate slowest (see lattice.hpp). Side length n >= 1.
class IncrementTensor {
 public:
  IncrementTensor(std::size_t m, std::size_t n, std::size_t d);
  IncrementTensor(std::size_t m, std::size_t n, std::size_t d, std::vector<double> data);

  // Entries drawn in linear order from one engine seeded by the SeedSpec.
  static IncrementTensor sample(const increments::GeneratorSpec& gen, std::size_t m,
                                std::size_t n, const increments::SeedSpec& seed);

  [[nodiscard]] std::size_t index_dim() const noexcept { return m_; }
  [[nodiscard]] std::size_t side() const noexcept { return n_; }
  [[nodiscard]] std::size_t dim() const noexcept { return d_; }
  [[nodiscard]] std::size_t entries() const noexcept { return entries_; }
  [[nodiscard]] std::span<const double> at(std::size_t linear) const {
    return {data_.data() + linear * d_, d_};
  }
  [[nodiscard]] std::span<double> at(std::size_t linear) {
    return {data_.data() + linear * d_, d_};
  }
  [[nodiscard]] std::size_t linear(std::span<const std::size_t> k) const;
  [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

  void require_finite() const;

 protected:
  std::size_t m_, n_, d_, entries_;
  std::vector<double> data_;
};

// Same layout; entry at k holds S_k = sum_{0 <= i <= k} X(i). Note S_0 is
// X(0), not zero.
class PrefixTensor : public IncrementTensor {
 public:
  using IncrementTensor::IncrementTensor;
};

// Inclusion-exclusion prefix sums: one pass per axis, O(m (n+1)^m d).
PrefixTensor prefix_sums(const IncrementTensor& inc);

// The (n+1)^m points S_k scaled by n^{-m/2}, in lattice order.
metric::PointCloud ms_cloud(const PrefixTensor& pref);

// Exact sup over u in [0,1]^m of |n^{-m} ||S_{floor(nu)}||^2 - u_1...u_m|.
// The walk is constant on each lattice cell while the product is monotone
// and continuous there, so the supremum is attained in the limit at cell
// corners: max over k of the gap against prod(k_i/n) and
// prod(min(k_i+1,n)/n).
double deviation_sup_exact(const PrefixTensor& pref);

// Cross term Q(k) = sum over ordered pairs i != j <= k of <X(i),X(j)>,
// computed through the norm identity ||S_k||^2 - sum_{i<=k} ||X(i)||^2.
double q_stat(const PrefixTensor& pref, const IncrementTensor& inc,
              std::span<const std::size_t> k);

// E|Q(n*1)|^2 = C * ((n+1)^{2m} - (n+1)^m) * sum_a (E X_a^2)^2. The
// constant rewards care: the ordered-pair double count contributes a factor
// the obvious derivation misses, and exhaustive enumeration over Rademacher
// sign patterns pins C = 2 (see tests).
inline constexpr double kQSecondMomentFactor = 2.0;
double q_second_moment_closed_form(std::size_t n, std::size_t m, double sigma4_sum);

// GH upper bound between the normalized walk cloud and the lattice spiral
// net under the canonical index correspondence k <-> rect(k/n).
double ms_gh_report(const PrefixTensor& pref);

}  // namespace spirallab::multisum
