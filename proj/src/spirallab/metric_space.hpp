#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spirallab::metric {

// Dense row-major set of points in R^dim.
class PointCloud {
 public:
  PointCloud(std::size_t count, std::size_t dim);
  PointCloud(std::size_t count, std::size_t dim, std::vector<double> data);

  [[nodiscard]] std::size_t count() const noexcept { return count_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  [[nodiscard]] std::span<double> point(std::size_t i) {
    return {data_.data() + i * dim_, dim_};
  }

  // Throws if any coordinate is non-finite.
  void require_finite() const;

 private:
  std::size_t count_;
  std::size_t dim_;
  std::vector<double> data_;
};

// Symmetric nonnegative distance matrix with zero diagonal. The triangle
// inequality is checked up to 1e-9 * max entry, absorbing float noise that
// accumulates in high-dimensional norms.
class FiniteMetricSpace {
 public:
  static constexpr double kTriangleRelTol = 1e-9;

  // Validates all invariants (O(size^3) for the triangle inequality).
  static FiniteMetricSpace from_matrix(std::size_t size, std::vector<double> dist);

  // For constructions that are metrics by design (Euclidean clouds, spiral
  // nets). Skips the O(size^3) check; `verify()` remains available.
  static FiniteMetricSpace from_matrix_unchecked(std::size_t size, std::vector<double> dist);

  // CSV with header "# fms v1, size=<n>" followed by size rows of size
  // comma-separated entries. Reading validates all invariants.
  static FiniteMetricSpace read_csv(const std::string& path);
  void write_csv(const std::string& path) const;

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return dist_[i * size_ + j]; }
  [[nodiscard]] double max_entry() const noexcept;
  [[nodiscard]] const std::vector<double>& matrix() const noexcept { return dist_; }

  void verify() const;

 private:
  FiniteMetricSpace(std::size_t size, std::vector<double> dist)
      : size_(size), dist_(std::move(dist)) {}

  std::size_t size_ = 0;
  std::vector<double> dist_;
};

// Relation between the index sets of two spaces, surjective both ways.
struct Correspondence {
  std::size_t left_size = 0;
  std::size_t right_size = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;

  void validate() const;
};

Correspondence identity_correspondence(std::size_t n);

// Index-proportional correspondence between sizes a and b; reduces to the
// identity when a == b.
Correspondence canonical_correspondence(std::size_t left, std::size_t right);

FiniteMetricSpace cloud_to_space(const PointCloud& cloud);

// sup over pairs of pairs in corr x corr of |d_X(i,i') - d_Y(j,j')|.
double distortion(const Correspondence& corr, const FiniteMetricSpace& x,
                  const FiniteMetricSpace& y);

inline constexpr std::size_t kGhExactCellCap = 25;

// Exact Gromov-Hausdorff distance, i.e. half the minimum distortion over
// all correspondences, found by branch-and-bound enumeration of relations
// on the |X| x |Y| cell grid. Requires |X|*|Y| <= kGhExactCellCap.
double gh_exact(const FiniteMetricSpace& x, const FiniteMetricSpace& y);

// Half the distortion of the supplied correspondence; an upper bound for
// gh_exact whenever the latter is computable.
double gh_upper_bound(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                      const Correspondence& corr);

}  // namespace spirallab::metric
