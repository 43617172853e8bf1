#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spirallab/spiral.hpp"

namespace spirallab::vcfam {

enum class FamilyKind { LowerLeftRects, Intervals, AxisRects, HalfPlanes, FiniteFamily };

// Set family over [0,1]^p (parametric kinds keep their parameters inside
// the cube; half-planes have unrestricted parameters and p = 2) or over an
// abstract ground set {0..ground_size-1} given as bitmasks.
struct FamilySpec {
  FamilyKind kind = FamilyKind::Intervals;
  std::size_t p = 1;
  std::size_t ground_size = 0;
  std::vector<std::uint32_t> sets;

  static FamilySpec intervals();
  static FamilySpec lower_left_rects(std::size_t p);
  static FamilySpec axis_rects(std::size_t p);
  static FamilySpec half_planes();
  static FamilySpec finite(std::size_t ground_size, std::vector<std::uint32_t> sets);

  void validate() const;
  [[nodiscard]] std::string name() const;
};

// All achievable traces {i : points[i] in A} over the family, as sorted
// bitmasks. At most 20 points. Parametric families are enumerated over
// canonical parameters built from the point coordinates (thresholds at
// coordinates and midpoints between consecutive distinct coordinates, with
// the cube edges 0 and 1 as sentinels); a trace can only change when a set
// boundary crosses a point, so this enumeration is exact. For the finite
// kind each point is a 1-d integral ground index.
std::vector<std::uint32_t> traces(const FamilySpec& family,
                                  const std::vector<std::vector<double>>& points);

bool shatters(const FamilySpec& family, const std::vector<std::vector<double>>& points);

enum class VcVariant { Some, All };

struct VcDimResult {
  std::size_t value = 0;
  bool exact = false;             // exhaustive finite-family search
  bool budget_exhausted = false;  // search stopped on budget; value is a floor

  [[nodiscard]] std::string display() const;
};

// Some: largest cardinality at which a shattered candidate set was found (a
// certified lower bound; exact for the finite kind). All: largest
// cardinality at which every tried candidate was shattered, matching the
// "shatters all finite subsets" reading; inherently a sampled verdict for
// parametric kinds. Candidates mix a coarse coordinate grid with seeded
// random draws; the budget caps the number of candidate evaluations.
VcDimResult vc_dim(const FamilySpec& family, VcVariant variant, std::size_t search_budget,
                   std::uint64_t seed = 0x5EEDF00DULL);

// Size of a greedy cover of the net under the empirical L1 distance
// (fraction of sample points in the symmetric difference): centers picked
// by maximum residual coverage, ties to the lowest index. An upper bound on
// the covering number of the net.
std::size_t covering_number_L1(const std::vector<spiral::RectSet>& net,
                               const std::vector<std::vector<double>>& sample_points,
                               double eps);

struct Bracket {
  spiral::RectSet lower;
  spiral::RectSet upper;
};

struct BracketNet {
  double eps = 0.0;
  std::vector<Bracket> brackets;
};

// Grid brackets (rect(g/N), rect(min(g+1,N)/N)) with N = ceil(p/eps), so
// each Lebesgue width is at most p/N <= eps. Net size (N+1)^p.
BracketNet bracket_net_rects(std::size_t p, double eps);

// mu(upper \ lower); the pair must be nested.
double bracket_width(const Bracket& bracket, const spiral::MeasureSpec& mu);

}  // namespace spirallab::vcfam
