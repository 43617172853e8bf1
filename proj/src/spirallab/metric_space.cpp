#include "spirallab/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spirallab::metric {

namespace {

void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

PointCloud::PointCloud(std::size_t count, std::size_t dim)
    : count_(count), dim_(dim), data_(count * dim, 0.0) {
  if (count == 0 || dim == 0) fail("PointCloud: count and dim must be positive");
}

PointCloud::PointCloud(std::size_t count, std::size_t dim, std::vector<double> data)
    : count_(count), dim_(dim), data_(std::move(data)) {
  if (count == 0 || dim == 0) fail("PointCloud: count and dim must be positive");
  if (data_.size() != count * dim) fail("PointCloud: data size does not match count*dim");
  require_finite();
}

void PointCloud::require_finite() const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      fail("PointCloud: non-finite coordinate at point " + std::to_string(i / dim_) +
           ", axis " + std::to_string(i % dim_));
    }
  }
}

FiniteMetricSpace FiniteMetricSpace::from_matrix(std::size_t size, std::vector<double> dist) {
  FiniteMetricSpace s = from_matrix_unchecked(size, std::move(dist));
  s.verify();
  return s;
}

FiniteMetricSpace FiniteMetricSpace::from_matrix_unchecked(std::size_t size,
                                                           std::vector<double> dist) {
  if (size == 0) fail("FiniteMetricSpace: size must be positive");
  if (dist.size() != size * size) fail("FiniteMetricSpace: matrix size mismatch");
  return FiniteMetricSpace(size, std::move(dist));
}

double FiniteMetricSpace::max_entry() const noexcept {
  double m = 0.0;
  for (double v : dist_) m = std::max(m, v);
  return m;
}

void FiniteMetricSpace::verify() const {
  const std::size_t n = size_;
  for (std::size_t i = 0; i < n; ++i) {
    if (dist_[i * n + i] != 0.0) fail("FiniteMetricSpace: nonzero diagonal at " + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      const double v = dist_[i * n + j];
      if (!std::isfinite(v) || v < 0.0) {
        fail("FiniteMetricSpace: entry (" + std::to_string(i) + "," + std::to_string(j) +
             ") is negative or non-finite");
      }
      if (v != dist_[j * n + i]) {
        fail("FiniteMetricSpace: asymmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  const double tol = kTriangleRelTol * max_entry();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dij = dist_[i * n + j];
      for (std::size_t k = 0; k < n; ++k) {
        if (dist_[i * n + k] > dij + dist_[j * n + k] + tol) {
          fail("FiniteMetricSpace: triangle inequality violated at (" + std::to_string(i) + "," +
               std::to_string(j) + "," + std::to_string(k) + ")");
        }
      }
    }
  }
}

FiniteMetricSpace FiniteMetricSpace::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("fms csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("fms csv: empty file " + path);
  const std::string prefix = "# fms v1, size=";
  if (line.rfind(prefix, 0) != 0) {
    throw std::runtime_error("fms csv: bad header in " + path + " (expected '" + prefix + "<n>')");
  }
  std::size_t size = 0;
  try {
    size = std::stoul(line.substr(prefix.size()));
  } catch (const std::exception&) {
    throw std::runtime_error("fms csv: unparsable size in header of " + path);
  }
  if (size == 0) throw std::runtime_error("fms csv: size must be positive in " + path);

  std::vector<double> dist;
  dist.reserve(size * size);
  for (std::size_t r = 0; r < size; ++r) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("fms csv: missing row " + std::to_string(r) + " in " + path);
    }
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw std::runtime_error("fms csv: unparsable entry '" + cell + "' in " + path);
      }
      dist.push_back(v);
      ++c;
    }
    if (c != size) {
      throw std::runtime_error("fms csv: row " + std::to_string(r) + " has " + std::to_string(c) +
                               " entries, expected " + std::to_string(size) + " in " + path);
    }
  }
  return from_matrix(size, std::move(dist));
}

void FiniteMetricSpace::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("fms csv: cannot write " + path);
  out << "# fms v1, size=" << size_ << "\n";
  char buf[40];
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t j = 0; j < size_; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", dist_[i * size_ + j]);
      out << buf << (j + 1 == size_ ? "\n" : ",");
    }
  }
  if (!out) throw std::runtime_error("fms csv: write failed for " + path);
}

void Correspondence::validate() const {
  if (left_size == 0 || right_size == 0) fail("Correspondence: sizes must be positive");
  if (pairs.empty()) fail("Correspondence: no pairs");
  std::vector<std::uint8_t> lcov(left_size, 0), rcov(right_size, 0);
  for (const auto& [i, j] : pairs) {
    if (i >= left_size || j >= right_size) {
      fail("Correspondence: pair (" + std::to_string(i) + "," + std::to_string(j) +
           ") out of range");
    }
    lcov[i] = 1;
    rcov[j] = 1;
  }
  for (std::size_t i = 0; i < left_size; ++i) {
    if (!lcov[i]) fail("Correspondence: left index " + std::to_string(i) + " uncovered");
  }
  for (std::size_t j = 0; j < right_size; ++j) {
    if (!rcov[j]) fail("Correspondence: right index " + std::to_string(j) + " uncovered");
  }
}

Correspondence identity_correspondence(std::size_t n) {
  if (n == 0) fail("identity_correspondence: size must be positive");
  Correspondence c;
  c.left_size = c.right_size = n;
  c.pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.pairs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i));
  }
  return c;
}

Correspondence canonical_correspondence(std::size_t left, std::size_t right) {
  if (left == 0 || right == 0) fail("canonical_correspondence: sizes must be positive");
  auto scaled = [](std::size_t i, std::size_t from, std::size_t to) -> std::uint32_t {
    if (from <= 1) return 0;
    // round(i * (to-1) / (from-1))
    return static_cast<std::uint32_t>((i * (to - 1) + (from - 1) / 2) / (from - 1));
  };
  Correspondence c;
  c.left_size = left;
  c.right_size = right;
  for (std::size_t i = 0; i < left; ++i) {
    c.pairs.emplace_back(static_cast<std::uint32_t>(i), scaled(i, left, right));
  }
  for (std::size_t j = 0; j < right; ++j) {
    c.pairs.emplace_back(scaled(j, right, left), static_cast<std::uint32_t>(j));
  }
  std::sort(c.pairs.begin(), c.pairs.end());
  c.pairs.erase(std::unique(c.pairs.begin(), c.pairs.end()), c.pairs.end());
  return c;
}

FiniteMetricSpace cloud_to_space(const PointCloud& cloud) {
  cloud.require_finite();
  const std::size_t n = cloud.count();
  const std::size_t d = cloud.dim();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* pi = cloud.point(i).data();
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* pj = cloud.point(j).data();
      double acc = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double diff = pi[a] - pj[a];
        acc += diff * diff;
      }
      const double v = std::sqrt(acc);
      dist[i * n + j] = v;
      dist[j * n + i] = v;
    }
  }
  return FiniteMetricSpace::from_matrix_unchecked(n, std::move(dist));
}

double distortion(const Correspondence& corr, const FiniteMetricSpace& x,
                  const FiniteMetricSpace& y) {
  corr.validate();
  if (corr.left_size != x.size() || corr.right_size != y.size()) {
    fail("distortion: correspondence sizes do not match the spaces");
  }
  double sup = 0.0;
  const std::size_t m = corr.pairs.size();
  for (std::size_t a = 0; a < m; ++a) {
    const auto [i, j] = corr.pairs[a];
    for (std::size_t b = a + 1; b < m; ++b) {
      const auto [i2, j2] = corr.pairs[b];
      sup = std::max(sup, std::fabs(x.at(i, i2) - y.at(j, j2)));
    }
  }
  return sup;
}

namespace {

// Branch-and-bound over all relations on the |X| x |Y| cell grid, cells in
// row-major order. A branch dies when its partial distortion reaches the
// best complete correspondence found so far, or when skipping a cell would
// strand an uncovered row/column.
class GhSearch {
 public:
  GhSearch(const FiniteMetricSpace& x, const FiniteMetricSpace& y, double initial_best)
      : x_(x), y_(y), nx_(x.size()), ny_(y.size()), best_(initial_best) {
    row_cov_.assign(nx_, 0);
    col_cov_.assign(ny_, 0);
    chosen_.reserve(nx_ * ny_);
  }

  double run() {
    step(0, 0.0);
    return best_;
  }

 private:
  void step(std::size_t cell, double dist_so_far) {
    if (dist_so_far >= best_) return;
    if (cell == nx_ * ny_) {
      best_ = dist_so_far;
      return;
    }
    const std::size_t i = cell / ny_;
    const std::size_t j = cell % ny_;

    // Include (i, j).
    double included = dist_so_far;
    for (const auto& [a, b] : chosen_) {
      included = std::max(included, std::fabs(x_.at(i, a) - y_.at(j, b)));
      if (included >= best_) break;
    }
    if (included < best_) {
      chosen_.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      ++row_cov_[i];
      ++col_cov_[j];
      step(cell + 1, included);
      --row_cov_[i];
      --col_cov_[j];
      chosen_.pop_back();
    }

    // Exclude (i, j), unless that leaves row i or column j uncoverable.
    const bool row_stranded = (j == ny_ - 1) && row_cov_[i] == 0;
    const bool col_stranded = (i == nx_ - 1) && col_cov_[j] == 0;
    if (!row_stranded && !col_stranded) step(cell + 1, dist_so_far);
  }

  const FiniteMetricSpace& x_;
  const FiniteMetricSpace& y_;
  std::size_t nx_, ny_;
  double best_;
  std::vector<int> row_cov_, col_cov_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> chosen_;
};

}  // namespace

double gh_exact(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
  const std::size_t cells = x.size() * y.size();
  if (cells > kGhExactCellCap) {
    throw std::domain_error(
        "gh_exact: |X|*|Y| = " + std::to_string(cells) + " exceeds the enumeration cap of " +
        std::to_string(kGhExactCellCap) + "; use gh_upper_bound with an explicit correspondence");
  }
  // Seed the search with an achieved bound so pruning bites immediately.
  const double seed = distortion(canonical_correspondence(x.size(), y.size()), x, y);
  if (seed == 0.0) return 0.0;
  GhSearch search(x, y, seed);
  return 0.5 * search.run();
}

double gh_upper_bound(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                      const Correspondence& corr) {
  return 0.5 * distortion(corr, x, y);
}

}  // namespace spirallab::metric
