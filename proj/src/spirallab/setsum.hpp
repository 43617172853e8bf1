#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spirallab/increments.hpp"
#include "spirallab/spiral.hpp"
#include "spirallab/vcfam.hpp"

namespace spirallab::setsum {

// n independent (increment, mark) pairs; marks live in [0,1]^p.
class MarkedSample {
 public:
  MarkedSample(std::size_t n, std::size_t d, std::size_t p);

  [[nodiscard]] std::size_t n() const noexcept { return n_; }
  [[nodiscard]] std::size_t d() const noexcept { return d_; }
  [[nodiscard]] std::size_t p() const noexcept { return p_; }
  [[nodiscard]] std::span<const double> x(std::size_t i) const {
    return {xs_.data() + i * d_, d_};
  }
  [[nodiscard]] std::span<double> x(std::size_t i) { return {xs_.data() + i * d_, d_}; }
  [[nodiscard]] std::span<const double> mark(std::size_t i) const {
    return {us_.data() + i * p_, p_};
  }
  [[nodiscard]] std::span<double> mark(std::size_t i) { return {us_.data() + i * p_, p_}; }

  void validate() const;  // marks inside the cube, all entries finite

 private:
  std::size_t n_, d_, p_;
  std::vector<double> xs_;
  std::vector<double> us_;
};

// Increments from sub-stream 0 and marks from sub-stream 1 of the seed, so
// X and U are independent per item and the draw is bit-reproducible.
// Lebesgue marks are uniform, discrete marks categorical, Dirac marks
// constant.
MarkedSample sample_marked(const increments::GeneratorSpec& gen, const spiral::MeasureSpec& mu,
                           std::size_t n, const increments::SeedSpec& seed);

// S_n(A) = sum of x_i over items whose mark lies in A (closed membership).
std::vector<double> set_sum(const MarkedSample& sample, const spiral::RectSet& a);

struct DeviationResult {
  double sup_sq = 0.0;    // sup over sets of |n^{-1}||S(A)||^2 - mu(A)|
  double sup_root = 0.0;  // sup over sets of |n^{-1/2}||S(A)|| - mu(A)^{1/2}|
  bool exact = false;     // exact cell-by-cell supremum vs. a finite net maximum
};

// Exact supremum over all lower-left rectangles for p <= 2 under the
// Lebesgue measure. S([0,t]) is piecewise constant on the grid cut by the
// mark coordinates while mu([0,t]) is monotone on each cell, so both
// statistics are extremized at cell corners. Larger p or non-Lebesgue
// measures are rejected towards net mode.
DeviationResult si_deviation_sup(const MarkedSample& sample, const vcfam::FamilySpec& family,
                                 const spiral::MeasureSpec& mu);

// Maximum over the supplied net; a lower bound on the full supremum.
DeviationResult si_deviation_sup_net(const MarkedSample& sample,
                                     const std::vector<spiral::RectSet>& net,
                                     const spiral::MeasureSpec& mu);

// ||S(A)||^2 - sum_{marks in A} ||x_i||^2, the off-diagonal inner-product
// mass of the set A.
double si_cross_term(const MarkedSample& sample, const spiral::RectSet& a);

// GH upper bound between the cloud {n^{-1/2} S(A) : A in net} and the
// spiral net on the same sets, canonical index correspondence.
double si_gh_report(const MarkedSample& sample, const std::vector<spiral::RectSet>& net,
                    const spiral::MeasureSpec& mu);

}  // namespace spirallab::setsum
