#include "spirallab/setsum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spirallab/lattice.hpp"

namespace spirallab::setsum {

namespace {

void fail(const std::string& msg) { throw std::invalid_argument(msg); }

double squared_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

// One axis of the mark-induced grid. On [lo, hi) the set of included
// distinct coordinate values is frozen at `incl` (closed membership, so a
// mark enters exactly at its own coordinate); the degenerate last cell {1}
// is carried as lo == hi == 1.
struct AxisCell {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t incl = 0;
};

std::vector<AxisCell> axis_cells(std::vector<double> coords) {
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());

  std::vector<double> breaks{0.0};
  for (double c : coords) {
    if (c > 0.0 && c < 1.0) breaks.push_back(c);
  }
  breaks.push_back(1.0);

  auto rank_of = [&](double t) {
    return static_cast<std::size_t>(
        std::upper_bound(coords.begin(), coords.end(), t) - coords.begin());
  };

  std::vector<AxisCell> cells;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    cells.push_back({breaks[i], breaks[i + 1], rank_of(breaks[i])});
  }
  cells.push_back({1.0, 1.0, rank_of(1.0)});
  return cells;
}

std::vector<std::size_t> mark_ranks(const MarkedSample& sample, std::size_t axis,
                                    std::vector<double>& distinct_out) {
  distinct_out.clear();
  for (std::size_t i = 0; i < sample.n(); ++i) distinct_out.push_back(sample.mark(i)[axis]);
  std::sort(distinct_out.begin(), distinct_out.end());
  distinct_out.erase(std::unique(distinct_out.begin(), distinct_out.end()), distinct_out.end());
  std::vector<std::size_t> ranks(sample.n());
  for (std::size_t i = 0; i < sample.n(); ++i) {
    ranks[i] = static_cast<std::size_t>(std::lower_bound(distinct_out.begin(), distinct_out.end(),
                                                         sample.mark(i)[axis]) -
                                        distinct_out.begin()) +
               1;
  }
  return ranks;
}

void update_result(DeviationResult& res, double v_sq, double mass) {
  res.sup_sq = std::max(res.sup_sq, std::fabs(v_sq - mass));
  res.sup_root = std::max(res.sup_root, std::fabs(std::sqrt(v_sq) - std::sqrt(mass)));
}

DeviationResult exact_sup_p1(const MarkedSample& sample) {
  const std::size_t n = sample.n();
  const std::size_t d = sample.d();

  std::vector<double> distinct;
  const auto ranks = mark_ranks(sample, 0, distinct);
  const std::size_t r_max = distinct.size();

  // Cumulative squared norms over mark ranks.
  std::vector<double> vsq(r_max + 1, 0.0);
  std::vector<double> acc(d, 0.0);
  std::vector<std::vector<std::size_t>> by_rank(r_max + 1);
  for (std::size_t i = 0; i < n; ++i) by_rank[ranks[i]].push_back(i);
  for (std::size_t r = 1; r <= r_max; ++r) {
    for (std::size_t i : by_rank[r]) {
      const auto x = sample.x(i);
      for (std::size_t a = 0; a < d; ++a) acc[a] += x[a];
    }
    vsq[r] = squared_norm(acc);
  }

  DeviationResult res;
  res.exact = true;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (const AxisCell& cell : axis_cells(distinct)) {
    const double v = vsq[cell.incl] * inv_n;
    update_result(res, v, cell.lo);
    update_result(res, v, cell.hi);
  }
  return res;
}

DeviationResult exact_sup_p2(const MarkedSample& sample) {
  const std::size_t n = sample.n();
  const std::size_t d = sample.d();

  std::vector<double> distinct1, distinct2;
  const auto ranks1 = mark_ranks(sample, 0, distinct1);
  const auto ranks2 = mark_ranks(sample, 1, distinct2);
  const std::size_t r1_max = distinct1.size();
  const std::size_t r2_max = distinct2.size();

  // vsq[r1][r2] = ||sum of x_i over rank1 <= r1, rank2 <= r2||^2, built by a
  // sweep over r1 so memory stays at O(r2_max * d).
  std::vector<std::vector<std::size_t>> by_rank1(r1_max + 1);
  for (std::size_t i = 0; i < n; ++i) by_rank1[ranks1[i]].push_back(i);

  std::vector<double> vsq((r1_max + 1) * (r2_max + 1), 0.0);
  std::vector<double> acc2((r2_max + 1) * d, 0.0);
  std::vector<double> prefix(d);
  for (std::size_t r1 = 1; r1 <= r1_max; ++r1) {
    for (std::size_t i : by_rank1[r1]) {
      double* dst = acc2.data() + ranks2[i] * d;
      const auto x = sample.x(i);
      for (std::size_t a = 0; a < d; ++a) dst[a] += x[a];
    }
    std::fill(prefix.begin(), prefix.end(), 0.0);
    for (std::size_t r2 = 1; r2 <= r2_max; ++r2) {
      const double* src = acc2.data() + r2 * d;
      for (std::size_t a = 0; a < d; ++a) prefix[a] += src[a];
      vsq[r1 * (r2_max + 1) + r2] = squared_norm(prefix);
    }
  }

  DeviationResult res;
  res.exact = true;
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto cells1 = axis_cells(distinct1);
  const auto cells2 = axis_cells(distinct2);
  for (const AxisCell& c1 : cells1) {
    for (const AxisCell& c2 : cells2) {
      const double v = vsq[c1.incl * (r2_max + 1) + c2.incl] * inv_n;
      update_result(res, v, c1.lo * c2.lo);
      update_result(res, v, c1.hi * c2.hi);
    }
  }
  return res;
}

}  // namespace

MarkedSample::MarkedSample(std::size_t n, std::size_t d, std::size_t p)
    : n_(n), d_(d), p_(p), xs_(n * d, 0.0), us_(n * p, 0.0) {
  if (n == 0 || d == 0 || p == 0) fail("MarkedSample: n, d and p must be positive");
}

void MarkedSample::validate() const {
  for (double v : xs_) {
    if (!std::isfinite(v)) fail("MarkedSample: non-finite increment entry");
  }
  for (double u : us_) {
    if (!(u >= 0.0 && u <= 1.0)) fail("MarkedSample: mark outside the unit cube");
  }
}

MarkedSample sample_marked(const increments::GeneratorSpec& gen, const spiral::MeasureSpec& mu,
                           std::size_t n, const increments::SeedSpec& seed) {
  gen.validate();
  if (n == 0) fail("sample_marked: n must be positive");

  MarkedSample sample(n, gen.dim, mu.dim());
  rng::Engine engine_x(rng::derive_stream(seed.engine_seed(), 0));
  rng::Engine engine_u(rng::derive_stream(seed.engine_seed(), 1));

  std::vector<double> cumulative;
  if (mu.kind() == spiral::MeasureKind::Discrete) {
    double acc = 0.0;
    for (double w : mu.weights()) {
      acc += w;
      cumulative.push_back(acc);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    increments::sample_into(gen, engine_x, sample.x(i));
    auto u = sample.mark(i);
    switch (mu.kind()) {
      case spiral::MeasureKind::LebesgueCube:
        for (double& v : u) v = engine_u.uniform01();
        break;
      case spiral::MeasureKind::Dirac:
        std::copy(mu.dirac_point().begin(), mu.dirac_point().end(), u.begin());
        break;
      case spiral::MeasureKind::Discrete: {
        const double roll = engine_u.uniform01();
        std::size_t idx = static_cast<std::size_t>(
            std::upper_bound(cumulative.begin(), cumulative.end(), roll) - cumulative.begin());
        if (idx >= mu.points().size()) idx = mu.points().size() - 1;
        std::copy(mu.points()[idx].begin(), mu.points()[idx].end(), u.begin());
        break;
      }
    }
  }
  return sample;
}

std::vector<double> set_sum(const MarkedSample& sample, const spiral::RectSet& a) {
  if (a.dim() != sample.p()) fail("set_sum: rectangle dimension does not match marks");
  std::vector<double> out(sample.d(), 0.0);
  for (std::size_t i = 0; i < sample.n(); ++i) {
    if (a.contains(sample.mark(i))) {
      const auto x = sample.x(i);
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += x[j];
    }
  }
  return out;
}

DeviationResult si_deviation_sup(const MarkedSample& sample, const vcfam::FamilySpec& family,
                                 const spiral::MeasureSpec& mu) {
  family.validate();
  if (family.kind != vcfam::FamilyKind::LowerLeftRects) {
    throw std::domain_error(
        "si_deviation_sup: exact mode covers lower-left rectangles only; use "
        "si_deviation_sup_net with a finite net");
  }
  if (family.p != sample.p() || mu.dim() != sample.p()) {
    fail("si_deviation_sup: dimension mismatch between family, measure and marks");
  }
  if (family.p > 2) {
    throw std::domain_error(
        "si_deviation_sup: exact mode supports p <= 2; use si_deviation_sup_net with a "
        "finite net for higher dimensions");
  }
  if (mu.kind() != spiral::MeasureKind::LebesgueCube) {
    throw std::domain_error(
        "si_deviation_sup: exact mode requires the Lebesgue measure; use "
        "si_deviation_sup_net for other measures");
  }
  return family.p == 1 ? exact_sup_p1(sample) : exact_sup_p2(sample);
}

DeviationResult si_deviation_sup_net(const MarkedSample& sample,
                                     const std::vector<spiral::RectSet>& net,
                                     const spiral::MeasureSpec& mu) {
  if (net.empty()) fail("si_deviation_sup_net: net must be nonempty");
  DeviationResult res;
  res.exact = false;
  const double inv_n = 1.0 / static_cast<double>(sample.n());
  for (const auto& a : net) {
    const double v = squared_norm(set_sum(sample, a)) * inv_n;
    update_result(res, v, spiral::measure_rect(mu, a));
  }
  return res;
}

double si_cross_term(const MarkedSample& sample, const spiral::RectSet& a) {
  if (a.dim() != sample.p()) fail("si_cross_term: rectangle dimension does not match marks");
  std::vector<double> sum(sample.d(), 0.0);
  double diag = 0.0;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    if (a.contains(sample.mark(i))) {
      const auto x = sample.x(i);
      diag += squared_norm(x);
      for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += x[j];
    }
  }
  return squared_norm(sum) - diag;
}

double si_gh_report(const MarkedSample& sample, const std::vector<spiral::RectSet>& net,
                    const spiral::MeasureSpec& mu) {
  if (net.empty()) fail("si_gh_report: net must be nonempty");
  const double scale = 1.0 / std::sqrt(static_cast<double>(sample.n()));
  metric::PointCloud cloud(net.size(), sample.d());
  for (std::size_t c = 0; c < net.size(); ++c) {
    const auto s = set_sum(sample, net[c]);
    auto dst = cloud.point(c);
    for (std::size_t a = 0; a < s.size(); ++a) dst[a] = scale * s[a];
  }
  const auto sums_space = metric::cloud_to_space(cloud);
  const auto reference = spiral::spiral_net(net, mu);
  return metric::gh_upper_bound(sums_space, reference,
                                metric::identity_correspondence(net.size()));
}

}  // namespace spirallab::setsum
