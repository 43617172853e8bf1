#include "spirallab/spiral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spirallab/lattice.hpp"

namespace spirallab::spiral {

namespace {

void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void require_cube_point(std::span<const double> x, const char* what) {
  if (x.empty()) fail(std::string(what) + ": dimension must be positive");
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) fail(std::string(what) + ": coordinates must lie in [0,1]");
  }
}

}  // namespace

MeasureSpec MeasureSpec::lebesgue(std::size_t p) {
  if (p == 0) fail("MeasureSpec: dimension must be positive");
  MeasureSpec m;
  m.kind_ = MeasureKind::LebesgueCube;
  m.dim_ = p;
  return m;
}

MeasureSpec MeasureSpec::dirac(std::vector<double> x) {
  require_cube_point(x, "MeasureSpec(dirac)");
  MeasureSpec m;
  m.kind_ = MeasureKind::Dirac;
  m.dim_ = x.size();
  m.dirac_x_ = std::move(x);
  return m;
}

MeasureSpec MeasureSpec::discrete(std::vector<std::vector<double>> points,
                                  std::vector<double> weights) {
  if (points.empty()) fail("MeasureSpec(discrete): needs at least one atom");
  if (points.size() != weights.size()) fail("MeasureSpec(discrete): points/weights size mismatch");
  const std::size_t p = points.front().size();
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != p) fail("MeasureSpec(discrete): inconsistent atom dimensions");
    require_cube_point(points[i], "MeasureSpec(discrete)");
    if (!(weights[i] >= 0.0)) fail("MeasureSpec(discrete): weights must be nonnegative");
    total += weights[i];
  }
  if (std::fabs(total - 1.0) > 1e-12) fail("MeasureSpec(discrete): weights must sum to 1");
  MeasureSpec m;
  m.kind_ = MeasureKind::Discrete;
  m.dim_ = p;
  m.points_ = std::move(points);
  m.weights_ = std::move(weights);
  return m;
}

RectSet::RectSet(std::vector<double> u) : upper(std::move(u)) {
  require_cube_point(upper, "RectSet");
}

bool RectSet::contains(std::span<const double> x) const noexcept {
  if (x.size() != upper.size()) return false;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] <= upper[i])) return false;
  }
  return true;
}

double rho_classic(double t, double s) {
  if (!(t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0)) {
    fail("rho_classic: arguments must lie in [0,1]");
  }
  return std::sqrt(std::fabs(t - s));
}

double rho_ws_m(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.empty()) fail("rho_ws_m: dimension mismatch");
  require_cube_point(u, "rho_ws_m");
  require_cube_point(v, "rho_ws_m");
  double pu = 1.0, pv = 1.0, pm = 1.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    pu *= u[i];
    pv *= v[i];
    pm *= std::min(u[i], v[i]);
  }
  return std::sqrt(std::max(0.0, pu + pv - 2.0 * pm));
}

double measure_rect(const MeasureSpec& mu, const RectSet& a) {
  if (a.dim() != mu.dim()) fail("measure_rect: dimension mismatch");
  switch (mu.kind()) {
    case MeasureKind::LebesgueCube: {
      double prod = 1.0;
      for (double t : a.upper) prod *= t;
      return prod;
    }
    case MeasureKind::Dirac:
      return a.contains(mu.dirac_point()) ? 1.0 : 0.0;
    case MeasureKind::Discrete: {
      double mass = 0.0;
      for (std::size_t i = 0; i < mu.points().size(); ++i) {
        if (a.contains(mu.points()[i])) mass += mu.weights()[i];
      }
      return mass;
    }
  }
  fail("measure_rect: unknown measure kind");
  return 0.0;
}

double rho_mu(const RectSet& a, const RectSet& b, const MeasureSpec& mu) {
  if (a.dim() != b.dim() || a.dim() != mu.dim()) fail("rho_mu: dimension mismatch");
  switch (mu.kind()) {
    case MeasureKind::LebesgueCube: {
      double pa = 1.0, pb = 1.0, pm = 1.0;
      for (std::size_t i = 0; i < a.dim(); ++i) {
        pa *= a.upper[i];
        pb *= b.upper[i];
        pm *= std::min(a.upper[i], b.upper[i]);
      }
      return std::sqrt(std::max(0.0, pa + pb - 2.0 * pm));
    }
    case MeasureKind::Dirac: {
      const bool ina = a.contains(mu.dirac_point());
      const bool inb = b.contains(mu.dirac_point());
      return ina != inb ? 1.0 : 0.0;
    }
    case MeasureKind::Discrete: {
      double mass = 0.0;
      for (std::size_t i = 0; i < mu.points().size(); ++i) {
        if (a.contains(mu.points()[i]) != b.contains(mu.points()[i])) mass += mu.weights()[i];
      }
      return std::sqrt(std::max(0.0, mass));
    }
  }
  fail("rho_mu: unknown measure kind");
  return 0.0;
}

metric::FiniteMetricSpace spiral_net(const std::vector<RectSet>& family, const MeasureSpec& mu) {
  if (family.empty()) fail("spiral_net: family must be nonempty");
  const std::size_t n = family.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = rho_mu(family[i], family[j], mu);
      dist[i * n + j] = v;
      dist[j * n + i] = v;
    }
  }
  return metric::FiniteMetricSpace::from_matrix_unchecked(n, std::move(dist));
}

std::vector<RectSet> lattice_net(std::size_t p, std::size_t n) {
  if (p == 0) fail("lattice_net: dimension must be positive");
  if (n == 0) fail("lattice_net: subdivision count must be positive");
  const std::size_t total = lattice::pow_checked(n + 1, p);
  std::vector<RectSet> out;
  out.reserve(total);
  std::vector<std::size_t> k(p, 0);
  do {
    std::vector<double> upper(p);
    for (std::size_t i = 0; i < p; ++i) {
      upper[i] = static_cast<double>(k[i]) / static_cast<double>(n);
    }
    out.emplace_back(std::move(upper));
  } while (lattice::advance(k, n));
  return out;
}

}  // namespace spirallab::spiral
