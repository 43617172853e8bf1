#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spirallab/metric_space.hpp"

namespace spirallab::spiral {

enum class MeasureKind { LebesgueCube, Dirac, Discrete };

// Governing probability measure on [0,1]^p.
class MeasureSpec {
 public:
  static MeasureSpec lebesgue(std::size_t p);
  // Unit mass at x; x must lie inside the cube.
  static MeasureSpec dirac(std::vector<double> x);
  // Atoms inside the cube; weights nonnegative, summing to 1 within 1e-12.
  static MeasureSpec discrete(std::vector<std::vector<double>> points,
                              std::vector<double> weights);

  [[nodiscard]] MeasureKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::span<const double> dirac_point() const { return dirac_x_; }
  [[nodiscard]] const std::vector<std::vector<double>>& points() const { return points_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }

 private:
  MeasureSpec() = default;
  MeasureKind kind_ = MeasureKind::LebesgueCube;
  std::size_t dim_ = 0;
  std::vector<double> dirac_x_;
  std::vector<std::vector<double>> points_;
  std::vector<double> weights_;
};

// Lower-left rectangle [0,u_1] x ... x [0,u_p] inside the unit cube.
struct RectSet {
  std::vector<double> upper;

  explicit RectSet(std::vector<double> u);
  [[nodiscard]] std::size_t dim() const noexcept { return upper.size(); }
  // Closed membership: 0 <= x_i <= upper_i for every axis.
  [[nodiscard]] bool contains(std::span<const double> x) const noexcept;
};

// sqrt(|t - s|) on [0,1].
double rho_classic(double t, double s);

// (prod u + prod v - 2 prod min(u,v))^{1/2} on [0,1]^m.
double rho_ws_m(std::span<const double> u, std::span<const double> v);

// mu([0,a]) for the rectangle a.
double measure_rect(const MeasureSpec& mu, const RectSet& a);

// mu(A symmdiff B)^{1/2}.
double rho_mu(const RectSet& a, const RectSet& b, const MeasureSpec& mu);

// Pairwise rho_mu over the family. Distinct rectangles can sit at distance
// zero under degenerate measures; such duplicates are kept (pseudometric).
metric::FiniteMetricSpace spiral_net(const std::vector<RectSet>& family, const MeasureSpec& mu);

// {rect(k/n) : k in {0..n}^p} in row-major order, first coordinate slowest.
std::vector<RectSet> lattice_net(std::size_t p, std::size_t n);

}  // namespace spirallab::spiral
