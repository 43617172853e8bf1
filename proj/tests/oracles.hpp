// Brute-force reference implementations used to freeze expected values.
// Everything here is written independently of the library code paths it
// checks: direct loops, direct summation, exhaustive enumeration.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "spirallab/metric_space.hpp"
#include "spirallab/multisum.hpp"
#include "spirallab/setsum.hpp"

namespace oracles {

// Pairwise Euclidean distances by the plain double loop.
inline std::vector<double> pairwise_distances(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t a = 0; a < pts[i].size(); ++a) {
        acc += (pts[i][a] - pts[j][a]) * (pts[i][a] - pts[j][a]);
      }
      dist[i * n + j] = std::sqrt(acc);
    }
  }
  return dist;
}

// Distortion by exhaustive enumeration of pair quadruples.
inline double distortion(const spirallab::metric::Correspondence& corr,
                         const spirallab::metric::FiniteMetricSpace& x,
                         const spirallab::metric::FiniteMetricSpace& y) {
  double sup = 0.0;
  for (const auto& [i, j] : corr.pairs) {
    for (const auto& [i2, j2] : corr.pairs) {
      sup = std::max(sup, std::fabs(x.at(i, i2) - y.at(j, j2)));
    }
  }
  return sup;
}

// S_k by direct summation over the box i <= k, O((n+1)^{2m} d) overall.
inline std::vector<double> direct_prefix_at(const spirallab::multisum::IncrementTensor& inc,
                                            const std::vector<std::size_t>& k) {
  std::vector<double> sum(inc.dim(), 0.0);
  std::vector<std::size_t> i(k.size(), 0);
  for (;;) {
    const auto x = inc.at(inc.linear(i));
    for (std::size_t a = 0; a < sum.size(); ++a) sum[a] += x[a];
    std::size_t axis = i.size();
    bool advanced = false;
    while (axis-- > 0) {
      if (i[axis] < k[axis]) {
        ++i[axis];
        for (std::size_t j = axis + 1; j < i.size(); ++j) i[j] = 0;
        advanced = true;
        break;
      }
    }
    if (!advanced) return sum;
  }
}

// Q(k) as the literal double sum over ordered pairs i != j below k.
inline double q_double_sum(const spirallab::multisum::IncrementTensor& inc,
                           const std::vector<std::size_t>& k) {
  std::vector<std::vector<std::size_t>> box;
  {
    std::vector<std::size_t> i(k.size(), 0);
    for (;;) {
      box.push_back(i);
      std::size_t axis = i.size();
      bool advanced = false;
      while (axis-- > 0) {
        if (i[axis] < k[axis]) {
          ++i[axis];
          for (std::size_t j = axis + 1; j < i.size(); ++j) i[j] = 0;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
  }
  double q = 0.0;
  for (std::size_t a = 0; a < box.size(); ++a) {
    for (std::size_t b = 0; b < box.size(); ++b) {
      if (a == b) continue;
      const auto xa = inc.at(inc.linear(box[a]));
      const auto xb = inc.at(inc.linear(box[b]));
      double dot = 0.0;
      for (std::size_t c = 0; c < xa.size(); ++c) dot += xa[c] * xb[c];
      q += dot;
    }
  }
  return q;
}

// Exhaustive E Q(n*1)^2 for Rademacher increments: every sign pattern of the
// (n+1)^m * d entries, each with magnitude 1/sqrt(d).
inline double rademacher_q_second_moment(std::size_t m, std::size_t n, std::size_t d) {
  std::size_t entries = 1;
  for (std::size_t i = 0; i < m; ++i) entries *= (n + 1);
  const std::size_t bits = entries * d;
  const double mag = 1.0 / std::sqrt(static_cast<double>(d));
  const std::vector<std::size_t> full(m, n);

  double acc = 0.0;
  const std::uint64_t outcomes = std::uint64_t{1} << bits;
  for (std::uint64_t pattern = 0; pattern < outcomes; ++pattern) {
    std::vector<double> data(bits);
    for (std::size_t b = 0; b < bits; ++b) {
      data[b] = ((pattern >> b) & 1u) ? mag : -mag;
    }
    spirallab::multisum::IncrementTensor inc(m, n, d, std::move(data));
    const double q = q_double_sum(inc, full);
    acc += q * q;
  }
  return acc / static_cast<double>(outcomes);
}

// Dense-grid sample of the MS deviation statistic, fed by direct summation.
// Returns the max over an (steps+1)^m grid including both endpoints.
inline double ms_dev_grid(const spirallab::multisum::IncrementTensor& inc, std::size_t steps) {
  const std::size_t m = inc.index_dim();
  const std::size_t n = inc.side();
  double nm = 1.0;
  for (std::size_t i = 0; i < m; ++i) nm *= static_cast<double>(n);

  // Cache direct prefix norms on the lattice.
  std::vector<double> vcache(inc.entries());
  {
    std::vector<std::size_t> k(m, 0);
    std::size_t lin = 0;
    for (;;) {
      const auto s = direct_prefix_at(inc, k);
      double norm = 0.0;
      for (double v : s) norm += v * v;
      vcache[lin++] = norm / nm;
      std::size_t axis = m;
      bool advanced = false;
      while (axis-- > 0) {
        if (k[axis] < n) {
          ++k[axis];
          for (std::size_t j = axis + 1; j < m; ++j) k[j] = 0;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
  }

  double sup = 0.0;
  std::vector<std::size_t> g(m, 0);
  for (;;) {
    double prod = 1.0;
    std::size_t lin = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double u = static_cast<double>(g[i]) / static_cast<double>(steps);
      prod *= u;
      const std::size_t idx = std::min(static_cast<std::size_t>(
                                           std::floor(u * static_cast<double>(n))),
                                       n);
      lin = lin * (n + 1) + idx;
    }
    sup = std::max(sup, std::fabs(vcache[lin] - prod));
    std::size_t axis = m;
    bool advanced = false;
    while (axis-- > 0) {
      if (g[axis] < steps) {
        ++g[axis];
        for (std::size_t j = axis + 1; j < m; ++j) g[j] = 0;
        advanced = true;
        break;
      }
    }
    if (!advanced) return sup;
  }
}

// Dense-grid sample of the SI deviation statistic (p = 1), squared and root
// forms, each set sum evaluated directly.
struct SiGridSup {
  double sup_sq = 0.0;
  double sup_root = 0.0;
};

inline SiGridSup si_dev_grid_p1(const spirallab::setsum::MarkedSample& sample,
                                std::size_t steps) {
  SiGridSup out;
  const double n = static_cast<double>(sample.n());
  for (std::size_t g = 0; g <= steps; ++g) {
    const double t = static_cast<double>(g) / static_cast<double>(steps);
    std::vector<double> sum(sample.d(), 0.0);
    for (std::size_t i = 0; i < sample.n(); ++i) {
      if (sample.mark(i)[0] <= t) {
        const auto x = sample.x(i);
        for (std::size_t a = 0; a < sum.size(); ++a) sum[a] += x[a];
      }
    }
    double norm = 0.0;
    for (double v : sum) norm += v * v;
    const double vsq = norm / n;
    out.sup_sq = std::max(out.sup_sq, std::fabs(vsq - t));
    out.sup_root = std::max(out.sup_root, std::fabs(std::sqrt(vsq) - std::sqrt(t)));
  }
  return out;
}

// Cross term as the literal double sum over distinct item pairs in A.
inline double si_cross_double_sum(const spirallab::setsum::MarkedSample& sample,
                                  const spirallab::spiral::RectSet& a) {
  double q = 0.0;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    for (std::size_t j = 0; j < sample.n(); ++j) {
      if (i == j) continue;
      if (!a.contains(sample.mark(i)) || !a.contains(sample.mark(j))) continue;
      const auto xi = sample.x(i);
      const auto xj = sample.x(j);
      double dot = 0.0;
      for (std::size_t c = 0; c < xi.size(); ++c) dot += xi[c] * xj[c];
      q += dot;
    }
  }
  return q;
}

// Random Euclidean metric space for property tests.
inline spirallab::metric::FiniteMetricSpace random_space(std::mt19937_64& rng, std::size_t count,
                                                         std::size_t dim) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  spirallab::metric::PointCloud cloud(count, dim);
  for (std::size_t i = 0; i < count; ++i) {
    for (double& v : cloud.point(i)) v = unif(rng);
  }
  return spirallab::metric::cloud_to_space(cloud);
}

}  // namespace oracles
