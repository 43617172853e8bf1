#include "spirallab/vcfam.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "spirallab/rng.hpp"

namespace spirallab::vcfam {

namespace {

void fail(const std::string& msg) { throw std::invalid_argument(msg); }

constexpr std::size_t kMaxTracePoints = 20;
constexpr std::size_t kMaxTraceCombos = 50'000'000;

// Canonical axis thresholds: cube edges, the in-cube coordinates, and the
// midpoints between consecutive distinct values. Midpoints are never
// coordinates themselves, so the empty trace is always reachable.
std::vector<double> axis_thresholds(const std::vector<std::vector<double>>& points,
                                    std::size_t axis) {
  std::set<double> base{0.0, 1.0};
  for (const auto& pt : points) {
    const double v = pt[axis];
    if (v >= 0.0 && v <= 1.0) base.insert(v);
  }
  std::vector<double> out(base.begin(), base.end());
  const std::size_t n = out.size();
  for (std::size_t i = 0; i + 1 < n; ++i) out.push_back(0.5 * (out[i] + out[i + 1]));
  std::sort(out.begin(), out.end());
  return out;
}

std::uint32_t rect_mask(const std::vector<std::vector<double>>& points,
                        const std::vector<double>& t) {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool in = true;
    for (std::size_t a = 0; a < t.size() && in; ++a) {
      in = points[i][a] >= 0.0 && points[i][a] <= t[a];
    }
    if (in) mask |= (1u << i);
  }
  return mask;
}

std::vector<std::uint32_t> sorted_unique(std::vector<std::uint32_t> masks) {
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  return masks;
}

std::vector<std::uint32_t> traces_intervals(const std::vector<std::vector<double>>& points) {
  const auto th = axis_thresholds(points, 0);
  std::vector<std::uint32_t> masks;
  for (std::size_t ai = 0; ai < th.size(); ++ai) {
    for (std::size_t bi = ai; bi < th.size(); ++bi) {
      std::uint32_t mask = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double x = points[i][0];
        if (x >= th[ai] && x <= th[bi]) mask |= (1u << i);
      }
      masks.push_back(mask);
    }
  }
  return sorted_unique(masks);
}

std::vector<std::uint32_t> traces_lower_left(const FamilySpec& family,
                                             const std::vector<std::vector<double>>& points) {
  std::vector<std::vector<double>> axes;
  std::size_t combos = 1;
  for (std::size_t a = 0; a < family.p; ++a) {
    axes.push_back(axis_thresholds(points, a));
    combos *= axes.back().size();
    if (combos > kMaxTraceCombos) fail("traces: too many canonical parameters for llrects");
  }
  std::vector<std::uint32_t> masks;
  std::vector<std::size_t> idx(family.p, 0);
  std::vector<double> t(family.p);
  for (;;) {
    for (std::size_t a = 0; a < family.p; ++a) t[a] = axes[a][idx[a]];
    masks.push_back(rect_mask(points, t));
    std::size_t a = family.p;
    for (; a-- > 0;) {
      if (++idx[a] < axes[a].size()) break;
      idx[a] = 0;
      if (a == 0) return sorted_unique(masks);
    }
  }
}

std::vector<std::uint32_t> traces_axis_rects(const FamilySpec& family,
                                             const std::vector<std::vector<double>>& points) {
  // Distinct per-axis interval membership masks, then all products.
  std::vector<std::vector<std::uint32_t>> axis_masks(family.p);
  std::size_t combos = 1;
  for (std::size_t a = 0; a < family.p; ++a) {
    const auto th = axis_thresholds(points, a);
    std::vector<std::uint32_t> masks;
    for (std::size_t ai = 0; ai < th.size(); ++ai) {
      for (std::size_t bi = ai; bi < th.size(); ++bi) {
        std::uint32_t mask = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
          const double x = points[i][a];
          if (x >= th[ai] && x <= th[bi]) mask |= (1u << i);
        }
        masks.push_back(mask);
      }
    }
    axis_masks[a] = sorted_unique(std::move(masks));
    combos *= axis_masks[a].size();
    if (combos > kMaxTraceCombos) fail("traces: too many canonical parameters for axisrects");
  }
  std::vector<std::uint32_t> out;
  std::vector<std::size_t> idx(family.p, 0);
  for (;;) {
    std::uint32_t mask = ~0u;
    for (std::size_t a = 0; a < family.p; ++a) mask &= axis_masks[a][idx[a]];
    out.push_back(mask);
    std::size_t a = family.p;
    for (; a-- > 0;) {
      if (++idx[a] < axis_masks[a].size()) break;
      idx[a] = 0;
      if (a == 0) return sorted_unique(out);
    }
  }
}

std::vector<std::uint32_t> traces_half_planes(const std::vector<std::vector<double>>& points) {
  // Projection orders change only at directions perpendicular to point
  // differences; enumerating those critical angles plus the angular
  // midpoints between them covers every ordering.
  std::set<double> angles{0.0, 0.5 * std::numbers::pi, std::numbers::pi,
                          1.5 * std::numbers::pi};
  const std::size_t n = points.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double vx = points[j][0] - points[i][0];
      const double vy = points[j][1] - points[i][1];
      if (vx == 0.0 && vy == 0.0) continue;
      for (const auto [wx, wy] : {std::pair{-vy, vx}, std::pair{vy, -vx}}) {
        double a = std::atan2(wy, wx);
        if (a < 0.0) a += 2.0 * std::numbers::pi;
        angles.insert(a);
      }
    }
  }
  std::vector<double> dirs(angles.begin(), angles.end());
  const std::size_t base = dirs.size();
  for (std::size_t i = 0; i < base; ++i) {
    const double next = (i + 1 < base) ? dirs[i + 1] : dirs[0] + 2.0 * std::numbers::pi;
    dirs.push_back(0.5 * (dirs[i] + next));
  }

  std::vector<std::uint32_t> masks;
  std::vector<double> proj(n);
  for (double a : dirs) {
    const double wx = std::cos(a), wy = std::sin(a);
    for (std::size_t i = 0; i < n; ++i) proj[i] = wx * points[i][0] + wy * points[i][1];
    std::vector<double> th(proj);
    std::sort(th.begin(), th.end());
    th.erase(std::unique(th.begin(), th.end()), th.end());
    std::vector<double> cuts;
    cuts.push_back(th.empty() ? -1.0 : th.front() - 1.0);
    for (std::size_t i = 0; i < th.size(); ++i) {
      cuts.push_back(th[i]);
      if (i + 1 < th.size()) cuts.push_back(0.5 * (th[i] + th[i + 1]));
    }
    for (double c : cuts) {
      std::uint32_t mask = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (proj[i] <= c) mask |= (1u << i);
      }
      masks.push_back(mask);
    }
  }
  return sorted_unique(masks);
}

std::vector<std::uint32_t> traces_finite(const FamilySpec& family,
                                         const std::vector<std::vector<double>>& points) {
  std::vector<std::size_t> idx(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double v = points[i][0];
    const double r = std::round(v);
    if (std::fabs(v - r) > 1e-9 || r < 0.0 ||
        r >= static_cast<double>(family.ground_size)) {
      fail("traces: finite-family points must be integral ground indices");
    }
    idx[i] = static_cast<std::size_t>(r);
  }
  std::vector<std::uint32_t> masks;
  masks.reserve(family.sets.size());
  for (std::uint32_t set : family.sets) {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if ((set >> idx[i]) & 1u) mask |= (1u << i);
    }
    masks.push_back(mask);
  }
  return sorted_unique(masks);
}

}  // namespace

FamilySpec FamilySpec::intervals() { return {FamilyKind::Intervals, 1, 0, {}}; }

FamilySpec FamilySpec::lower_left_rects(std::size_t p) {
  return {FamilyKind::LowerLeftRects, p, 0, {}};
}

FamilySpec FamilySpec::axis_rects(std::size_t p) { return {FamilyKind::AxisRects, p, 0, {}}; }

FamilySpec FamilySpec::half_planes() { return {FamilyKind::HalfPlanes, 2, 0, {}}; }

FamilySpec FamilySpec::finite(std::size_t ground_size, std::vector<std::uint32_t> sets) {
  FamilySpec f;
  f.kind = FamilyKind::FiniteFamily;
  f.p = 1;
  f.ground_size = ground_size;
  f.sets = std::move(sets);
  return f;
}

void FamilySpec::validate() const {
  switch (kind) {
    case FamilyKind::Intervals:
      if (p != 1) fail("FamilySpec: intervals require p = 1");
      return;
    case FamilyKind::HalfPlanes:
      if (p != 2) fail("FamilySpec: half-planes require p = 2");
      return;
    case FamilyKind::LowerLeftRects:
    case FamilyKind::AxisRects:
      if (p == 0) fail("FamilySpec: dimension must be positive");
      return;
    case FamilyKind::FiniteFamily: {
      if (ground_size == 0 || ground_size > 20) {
        fail("FamilySpec: finite family ground size must be in 1..20");
      }
      if (sets.empty()) fail("FamilySpec: finite family needs at least one set");
      const std::uint32_t width = (1u << ground_size) - 1u;
      for (std::uint32_t s : sets) {
        if ((s & ~width) != 0) fail("FamilySpec: finite family bitmask wider than ground size");
      }
      return;
    }
  }
  fail("FamilySpec: unknown kind");
}

std::string FamilySpec::name() const {
  switch (kind) {
    case FamilyKind::Intervals: return "intervals";
    case FamilyKind::LowerLeftRects: return "llrects:" + std::to_string(p);
    case FamilyKind::AxisRects: return "axisrects:" + std::to_string(p);
    case FamilyKind::HalfPlanes: return "halfplanes";
    case FamilyKind::FiniteFamily: return "finite:" + std::to_string(ground_size);
  }
  return "?";
}

std::vector<std::uint32_t> traces(const FamilySpec& family,
                                  const std::vector<std::vector<double>>& points) {
  family.validate();
  if (points.size() > kMaxTracePoints) fail("traces: at most 20 points supported");
  const std::size_t want_dim = family.kind == FamilyKind::FiniteFamily ? 1 : family.p;
  for (const auto& pt : points) {
    if (pt.size() != want_dim) fail("traces: point dimension mismatch");
    for (double v : pt) {
      if (!std::isfinite(v)) fail("traces: non-finite point coordinate");
    }
  }
  if (points.empty()) return {0u};

  switch (family.kind) {
    case FamilyKind::Intervals: return traces_intervals(points);
    case FamilyKind::LowerLeftRects: return traces_lower_left(family, points);
    case FamilyKind::AxisRects: return traces_axis_rects(family, points);
    case FamilyKind::HalfPlanes: return traces_half_planes(points);
    case FamilyKind::FiniteFamily: return traces_finite(family, points);
  }
  fail("traces: unknown family kind");
  return {};
}

bool shatters(const FamilySpec& family, const std::vector<std::vector<double>>& points) {
  const auto tr = traces(family, points);
  return tr.size() == (std::size_t{1} << points.size());
}

namespace {

bool finite_subset_shattered(const FamilySpec& family, std::uint32_t subset, std::size_t k) {
  const std::size_t want = std::size_t{1} << k;
  std::unordered_set<std::uint32_t> seen;
  seen.reserve(want * 2);
  for (std::uint32_t s : family.sets) {
    seen.insert(s & subset);
    if (seen.size() == want) return true;
  }
  return false;
}

// Enumerates k-subsets of {0..g-1}; calls fn(mask); returns false when fn
// stops the scan.
template <typename Fn>
void for_each_subset(std::size_t g, std::size_t k, Fn&& fn) {
  if (k > g) return;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  for (;;) {
    std::uint32_t mask = 0;
    for (std::size_t v : pick) mask |= (1u << v);
    if (!fn(mask)) return;
    std::size_t i = k;
    for (; i-- > 0;) {
      if (pick[i] + (k - i) < g) {
        ++pick[i];
        for (std::size_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
        break;
      }
      if (i == 0) return;
    }
    if (k == 0) return;
  }
}

VcDimResult vc_dim_finite(const FamilySpec& family, VcVariant variant) {
  VcDimResult res;
  res.exact = true;
  const std::size_t g = family.ground_size;
  for (std::size_t k = 1; k <= g; ++k) {
    bool any = false, all = true;
    for_each_subset(g, k, [&](std::uint32_t subset) {
      const bool sh = finite_subset_shattered(family, subset, k);
      any = any || sh;
      all = all && sh;
      if (variant == VcVariant::Some) return !any;  // stop once a witness is found
      return all;                                   // stop once a counterexample is found
    });
    const bool level_ok = variant == VcVariant::Some ? any : all;
    if (!level_ok) return res;
    res.value = k;
  }
  return res;
}

std::vector<std::vector<double>> grid_points(std::size_t p) {
  static constexpr double kLevels[] = {0.0, 0.5, 1.0};
  std::vector<std::vector<double>> pts;
  std::vector<std::size_t> idx(p, 0);
  for (;;) {
    std::vector<double> pt(p);
    for (std::size_t a = 0; a < p; ++a) pt[a] = kLevels[idx[a]];
    pts.push_back(std::move(pt));
    std::size_t a = p;
    for (; a-- > 0;) {
      if (++idx[a] < 3) break;
      idx[a] = 0;
      if (a == 0) return pts;
    }
  }
}

VcDimResult vc_dim_parametric(const FamilySpec& family, VcVariant variant, std::size_t budget,
                              std::uint64_t seed) {
  VcDimResult res;
  std::size_t budget_left = budget;
  const std::size_t per_k = std::max<std::size_t>(32, budget / 8);
  const auto grid = grid_points(family.p);

  for (std::size_t k = 1; k <= kMaxTracePoints; ++k) {
    rng::Engine engine(rng::derive_stream(seed, k));
    // First the grid combinations, then random draws.
    std::vector<std::size_t> pick(k);
    bool grid_active = k <= grid.size();
    if (grid_active) {
      for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    }

    bool any = false, all = true;
    for (std::size_t trial = 0; trial < per_k; ++trial) {
      if (budget_left == 0) {
        res.budget_exhausted = true;
        return res;
      }
      --budget_left;

      std::vector<std::vector<double>> candidate;
      candidate.reserve(k);
      if (grid_active) {
        for (std::size_t v : pick) candidate.push_back(grid[v]);
        std::size_t i = k;
        for (; i-- > 0;) {
          if (pick[i] + (k - i) < grid.size()) {
            ++pick[i];
            for (std::size_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
            break;
          }
          if (i == 0) grid_active = false;
        }
      } else {
        for (std::size_t i = 0; i < k; ++i) {
          std::vector<double> pt(family.p);
          for (double& v : pt) v = engine.uniform01();
          candidate.push_back(std::move(pt));
        }
      }

      const bool sh = shatters(family, candidate);
      any = any || sh;
      all = all && sh;
      if (variant == VcVariant::Some && any) break;
      if (variant == VcVariant::All && !all) break;
    }

    const bool level_ok = variant == VcVariant::Some ? any : all;
    if (!level_ok) return res;
    res.value = k;
  }
  res.budget_exhausted = true;  // still succeeding at the point cap
  return res;
}

}  // namespace

std::string VcDimResult::display() const {
  std::string s = budget_exhausted ? ">=" + std::to_string(value) : std::to_string(value);
  s += exact ? " (exact)" : (budget_exhausted ? " (budget exhausted)" : " (search bound)");
  return s;
}

VcDimResult vc_dim(const FamilySpec& family, VcVariant variant, std::size_t search_budget,
                   std::uint64_t seed) {
  family.validate();
  if (search_budget == 0) fail("vc_dim: search budget must be positive");
  if (family.kind == FamilyKind::FiniteFamily) return vc_dim_finite(family, variant);
  return vc_dim_parametric(family, variant, search_budget, seed);
}

std::size_t covering_number_L1(const std::vector<spiral::RectSet>& net,
                               const std::vector<std::vector<double>>& sample_points,
                               double eps) {
  if (net.empty()) fail("covering_number_L1: net must be nonempty");
  if (sample_points.empty()) fail("covering_number_L1: empirical sample must be nonempty");
  if (!(eps > 0.0)) fail("covering_number_L1: eps must be positive");
  const std::size_t p = net.front().dim();
  for (const auto& r : net) {
    if (r.dim() != p) fail("covering_number_L1: inconsistent net dimensions");
  }
  const std::size_t n = sample_points.size();
  const std::size_t words = (n + 63) / 64;

  std::vector<std::uint64_t> membership(net.size() * words, 0);
  for (std::size_t c = 0; c < net.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      if (sample_points[i].size() != p) fail("covering_number_L1: sample dimension mismatch");
      if (net[c].contains(sample_points[i])) {
        membership[c * words + i / 64] |= (std::uint64_t{1} << (i % 64));
      }
    }
  }

  auto l1 = [&](std::size_t a, std::size_t b) {
    std::size_t diff = 0;
    for (std::size_t w = 0; w < words; ++w) {
      diff += static_cast<std::size_t>(
          __builtin_popcountll(membership[a * words + w] ^ membership[b * words + w]));
    }
    return static_cast<double>(diff) / static_cast<double>(n);
  };

  std::vector<std::uint8_t> covered(net.size(), 0);
  std::size_t remaining = net.size();
  std::size_t centers = 0;
  while (remaining > 0) {
    std::size_t best_center = 0, best_count = 0;
    for (std::size_t c = 0; c < net.size(); ++c) {
      std::size_t count = 0;
      for (std::size_t u = 0; u < net.size(); ++u) {
        if (!covered[u] && l1(c, u) <= eps) ++count;
      }
      if (count > best_count) {
        best_count = count;
        best_center = c;
      }
    }
    if (best_count == 0) throw std::logic_error("covering_number_L1: greedy made no progress");
    for (std::size_t u = 0; u < net.size(); ++u) {
      if (!covered[u] && l1(best_center, u) <= eps) {
        covered[u] = 1;
        --remaining;
      }
    }
    ++centers;
  }
  return centers;
}

BracketNet bracket_net_rects(std::size_t p, double eps) {
  if (p == 0) fail("bracket_net_rects: dimension must be positive");
  if (!(eps > 0.0)) fail("bracket_net_rects: eps must be positive");
  const std::size_t n = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(static_cast<double>(p) / eps)));

  BracketNet net;
  net.eps = eps;
  std::vector<std::size_t> g(p, 0);
  for (;;) {
    std::vector<double> lower(p), upper(p);
    for (std::size_t a = 0; a < p; ++a) {
      lower[a] = static_cast<double>(g[a]) / static_cast<double>(n);
      upper[a] = static_cast<double>(std::min(g[a] + 1, n)) / static_cast<double>(n);
    }
    net.brackets.push_back({spiral::RectSet(std::move(lower)), spiral::RectSet(std::move(upper))});
    std::size_t a = p;
    for (; a-- > 0;) {
      if (++g[a] <= n) break;
      g[a] = 0;
      if (a == 0) return net;
    }
  }
}

double bracket_width(const Bracket& bracket, const spiral::MeasureSpec& mu) {
  if (bracket.lower.dim() != bracket.upper.dim()) fail("bracket_width: dimension mismatch");
  for (std::size_t a = 0; a < bracket.lower.dim(); ++a) {
    if (bracket.lower.upper[a] > bracket.upper.upper[a]) {
      fail("bracket_width: bracket is not nested");
    }
  }
  return spiral::measure_rect(mu, bracket.upper) - spiral::measure_rect(mu, bracket.lower);
}

}  // namespace spirallab::vcfam
