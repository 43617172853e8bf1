#include "spirallab/multisum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spirallab/lattice.hpp"
#include "spirallab/spiral.hpp"

namespace spirallab::multisum {

namespace {

void fail(const std::string& msg) { throw std::invalid_argument(msg); }

double squared_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

bool bounded_advance(std::span<std::size_t> i, std::span<const std::size_t> bound) {
  for (std::size_t axis = i.size(); axis-- > 0;) {
    if (i[axis] < bound[axis]) {
      ++i[axis];
      for (std::size_t j = axis + 1; j < i.size(); ++j) i[j] = 0;
      return true;
    }
  }
  return false;
}

}  // namespace

IncrementTensor::IncrementTensor(std::size_t m, std::size_t n, std::size_t d)
    : m_(m), n_(n), d_(d), entries_(0) {
  if (m == 0 || d == 0) fail("IncrementTensor: m and d must be positive");
  if (n == 0) fail("IncrementTensor: side length n must be positive");
  entries_ = lattice::pow_checked(n + 1, m);
  data_.assign(entries_ * d_, 0.0);
}

IncrementTensor::IncrementTensor(std::size_t m, std::size_t n, std::size_t d,
                                 std::vector<double> data)
    : IncrementTensor(m, n, d) {
  if (data.size() != entries_ * d_) fail("IncrementTensor: data size mismatch");
  data_ = std::move(data);
  require_finite();
}

std::size_t IncrementTensor::linear(std::span<const std::size_t> k) const {
  if (k.size() != m_) fail("IncrementTensor: multi-index rank mismatch");
  return lattice::linear_index(k, n_);
}

void IncrementTensor::require_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) fail("IncrementTensor: non-finite entry");
  }
}

IncrementTensor IncrementTensor::sample(const increments::GeneratorSpec& gen, std::size_t m,
                                        std::size_t n, const increments::SeedSpec& seed) {
  gen.validate();
  IncrementTensor t(m, n, gen.dim);
  rng::Engine engine(seed.engine_seed());
  for (std::size_t lin = 0; lin < t.entries(); ++lin) {
    increments::sample_into(gen, engine, t.at(lin));
  }
  return t;
}

PrefixTensor prefix_sums(const IncrementTensor& inc) {
  inc.require_finite();
  const std::size_t m = inc.index_dim();
  const std::size_t n = inc.side();
  const std::size_t d = inc.dim();
  const std::size_t entries = inc.entries();

  PrefixTensor out(m, n, d);
  std::copy(inc.data().begin(), inc.data().end(), out.at(0).data());

  // Axis passes: after processing axis s, entry k holds the sum over the
  // box spanned by coordinates 0..s at k and exact coordinates elsewhere.
  std::size_t stride = entries / (n + 1);  // first coordinate is slowest
  for (std::size_t axis = 0; axis < m; ++axis) {
    for (std::size_t lin = 0; lin < entries; ++lin) {
      const std::size_t coord = (lin / stride) % (n + 1);
      if (coord == 0) continue;
      double* dst = out.at(lin).data();
      const double* src = out.at(lin - stride).data();
      for (std::size_t a = 0; a < d; ++a) dst[a] += src[a];
    }
    stride /= (n + 1);
  }

  for (double v : out.data()) {
    if (!std::isfinite(v)) fail("prefix_sums: overflow or non-finite partial sum");
  }
  return out;
}

metric::PointCloud ms_cloud(const PrefixTensor& pref) {
  const std::size_t entries = pref.entries();
  const std::size_t d = pref.dim();
  double nm = 1.0;
  for (std::size_t i = 0; i < pref.index_dim(); ++i) nm *= static_cast<double>(pref.side());
  const double scale = 1.0 / std::sqrt(nm);

  metric::PointCloud cloud(entries, d);
  for (std::size_t lin = 0; lin < entries; ++lin) {
    const auto src = pref.at(lin);
    auto dst = cloud.point(lin);
    for (std::size_t a = 0; a < d; ++a) dst[a] = scale * src[a];
  }
  return cloud;
}

double deviation_sup_exact(const PrefixTensor& pref) {
  const std::size_t m = pref.index_dim();
  const std::size_t n = pref.side();
  double nm = 1.0;
  for (std::size_t i = 0; i < m; ++i) nm *= static_cast<double>(n);
  const double inv_nm = 1.0 / nm;

  double sup = 0.0;
  std::vector<std::size_t> k(m, 0);
  std::size_t lin = 0;
  do {
    const double v = squared_norm(pref.at(lin)) * inv_nm;
    double lo = 1.0, hi = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      lo *= static_cast<double>(k[i]) / static_cast<double>(n);
      hi *= static_cast<double>(std::min(k[i] + 1, n)) / static_cast<double>(n);
    }
    sup = std::max({sup, std::fabs(v - lo), std::fabs(v - hi)});
    ++lin;
  } while (lattice::advance(k, n));
  return sup;
}

double q_stat(const PrefixTensor& pref, const IncrementTensor& inc,
              std::span<const std::size_t> k) {
  if (pref.index_dim() != inc.index_dim() || pref.side() != inc.side() ||
      pref.dim() != inc.dim()) {
    fail("q_stat: tensor shapes do not match");
  }
  const std::size_t lin_k = pref.linear(k);
  const double s_norm = squared_norm(pref.at(lin_k));

  // Sum of ||X(i)||^2 over the box i <= k.
  double diag = 0.0;
  std::vector<std::size_t> i(k.size(), 0);
  do {
    diag += squared_norm(inc.at(inc.linear(i)));
  } while (bounded_advance(i, k));
  return s_norm - diag;
}

double q_second_moment_closed_form(std::size_t n, std::size_t m, double sigma4_sum) {
  double nm = 1.0;
  for (std::size_t i = 0; i < m; ++i) nm *= static_cast<double>(n + 1);
  return kQSecondMomentFactor * (nm * nm - nm) * sigma4_sum;
}

double ms_gh_report(const PrefixTensor& pref) {
  const auto cloud = ms_cloud(pref);
  const auto walk_space = metric::cloud_to_space(cloud);
  const auto net = spiral::lattice_net(pref.index_dim(), pref.side());
  const auto reference = spiral::spiral_net(net, spiral::MeasureSpec::lebesgue(pref.index_dim()));
  const auto corr = metric::identity_correspondence(walk_space.size());
  return metric::gh_upper_bound(walk_space, reference, corr);
}

}  // namespace spirallab::multisum
