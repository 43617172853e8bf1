#include "spirallab.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "spirallab/experiment.hpp"
#include "spirallab/increments.hpp"
#include "spirallab/metric_space.hpp"
#include "spirallab/multisum.hpp"
#include "spirallab/setsum.hpp"
#include "spirallab/spiral.hpp"
#include "spirallab/vcfam.hpp"

struct spirallab_fms {
  spirallab::metric::FiniteMetricSpace space;
};

struct spirallab_report {
  spirallab::experiment::DeviationReport report;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs fn, translating exceptions into status codes + the thread-local
// message.
template <typename Fn>
spirallab_status guarded(Fn&& fn) {
  try {
    fn();
    return SPIRALLAB_OK;
  } catch (const nlohmann::json::exception& e) {
    set_error(std::string("json: ") + e.what());
    return SPIRALLAB_ERR_PARSE;
  } catch (const std::domain_error& e) {
    set_error(e.what());
    return SPIRALLAB_ERR_DOMAIN;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return SPIRALLAB_ERR_INVALID_ARGUMENT;
  } catch (const std::runtime_error& e) {
    set_error(e.what());
    return SPIRALLAB_ERR_IO;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return SPIRALLAB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return SPIRALLAB_ERR_INTERNAL;
  }
}

spirallab_status require(bool ok, const char* msg) {
  if (ok) return SPIRALLAB_OK;
  set_error(msg);
  return SPIRALLAB_ERR_INVALID_ARGUMENT;
}

spirallab::spiral::MeasureSpec measure_from_json_text(const char* measure_json,
                                                      std::size_t default_dim) {
  if (measure_json == nullptr || *measure_json == '\0') {
    return spirallab::spiral::MeasureSpec::lebesgue(default_dim);
  }
  const auto j = nlohmann::json::parse(measure_json);
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "lebesgue") {
    return spirallab::spiral::MeasureSpec::lebesgue(j.value("p", default_dim));
  }
  if (kind == "dirac") {
    return spirallab::spiral::MeasureSpec::dirac(j.at("x").get<std::vector<double>>());
  }
  if (kind == "discrete") {
    return spirallab::spiral::MeasureSpec::discrete(
        j.at("points").get<std::vector<std::vector<double>>>(),
        j.at("weights").get<std::vector<double>>());
  }
  throw std::invalid_argument("measure.kind: must be lebesgue|dirac|discrete");
}

spirallab::vcfam::FamilySpec family_from_json(const nlohmann::json& j) {
  using spirallab::vcfam::FamilySpec;
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "intervals") return FamilySpec::intervals();
    if (name == "llrects") return FamilySpec::lower_left_rects(1);
    if (name == "axisrects") return FamilySpec::axis_rects(1);
    if (name == "halfplanes") return FamilySpec::half_planes();
    throw std::invalid_argument("family: unknown name '" + name + "'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "intervals") return FamilySpec::intervals();
  if (kind == "llrects") return FamilySpec::lower_left_rects(j.value("p", std::size_t{1}));
  if (kind == "axisrects") return FamilySpec::axis_rects(j.value("p", std::size_t{1}));
  if (kind == "halfplanes") return FamilySpec::half_planes();
  if (kind == "finite") {
    return FamilySpec::finite(j.at("ground_size").get<std::size_t>(),
                              j.at("sets").get<std::vector<std::uint32_t>>());
  }
  throw std::invalid_argument("family.kind: must be intervals|llrects|axisrects|halfplanes|finite");
}

}  // namespace

extern "C" {

const char* spirallab_version(void) { return "0.1.0"; }

const char* spirallab_last_error(void) { return g_last_error.c_str(); }

void spirallab_string_free(char* s) { std::free(s); }

spirallab_status spirallab_fms_from_points(int count, int dim, const double* points,
                                           spirallab_fms** out) {
  if (auto rc = require(points && out && count > 0 && dim > 0,
                        "fms_from_points: null or non-positive argument")) {
    return rc;
  }
  return guarded([&] {
    const std::size_t c = static_cast<std::size_t>(count);
    const std::size_t d = static_cast<std::size_t>(dim);
    spirallab::metric::PointCloud cloud(c, d, std::vector<double>(points, points + c * d));
    *out = new spirallab_fms{spirallab::metric::cloud_to_space(cloud)};
  });
}

spirallab_status spirallab_fms_read_csv(const char* path, spirallab_fms** out) {
  if (auto rc = require(path && out, "fms_read_csv: null argument")) return rc;
  return guarded([&] {
    *out = new spirallab_fms{spirallab::metric::FiniteMetricSpace::read_csv(path)};
  });
}

spirallab_status spirallab_fms_write_csv(const spirallab_fms* fms, const char* path) {
  if (auto rc = require(fms && path, "fms_write_csv: null argument")) return rc;
  return guarded([&] { fms->space.write_csv(path); });
}

int spirallab_fms_size(const spirallab_fms* fms) {
  return fms ? static_cast<int>(fms->space.size()) : 0;
}

spirallab_status spirallab_fms_distance(const spirallab_fms* fms, int i, int j, double* out) {
  if (auto rc = require(fms && out, "fms_distance: null argument")) return rc;
  const int n = static_cast<int>(fms->space.size());
  if (auto rc = require(i >= 0 && j >= 0 && i < n && j < n, "fms_distance: index out of range")) {
    return rc;
  }
  *out = fms->space.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return SPIRALLAB_OK;
}

void spirallab_fms_free(spirallab_fms* fms) { delete fms; }

spirallab_status spirallab_gh_exact(const spirallab_fms* a, const spirallab_fms* b, double* out) {
  if (auto rc = require(a && b && out, "gh_exact: null argument")) return rc;
  return guarded([&] { *out = spirallab::metric::gh_exact(a->space, b->space); });
}

spirallab_status spirallab_gh_canonical_bound(const spirallab_fms* a, const spirallab_fms* b,
                                              double* out) {
  if (auto rc = require(a && b && out, "gh_canonical_bound: null argument")) return rc;
  return guarded([&] {
    const auto corr =
        spirallab::metric::canonical_correspondence(a->space.size(), b->space.size());
    *out = spirallab::metric::gh_upper_bound(a->space, b->space, corr);
  });
}

spirallab_status spirallab_spiral_net_lattice(int m, int n, const char* measure_json,
                                              spirallab_fms** out) {
  if (auto rc = require(out && m > 0 && n > 0, "spiral_net_lattice: non-positive m or n")) {
    return rc;
  }
  return guarded([&] {
    const auto mu = measure_from_json_text(measure_json, static_cast<std::size_t>(m));
    const auto net =
        spirallab::spiral::lattice_net(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    *out = new spirallab_fms{spirallab::spiral::spiral_net(net, mu)};
  });
}

spirallab_status spirallab_validate_generator(const char* generator, int d, int replicates,
                                              uint64_t seed, char** json_out) {
  if (auto rc = require(generator && json_out && d > 0 && replicates > 0,
                        "validate_generator: null or non-positive argument")) {
    return rc;
  }
  return guarded([&] {
    const auto gen =
        spirallab::increments::GeneratorSpec::parse(generator, static_cast<std::size_t>(d));
    const auto report = spirallab::increments::validate_conditions(
        gen, static_cast<std::size_t>(replicates), {seed, 0});
    *json_out = dup_string(report.to_json());
    if (*json_out == nullptr) throw std::bad_alloc();
  });
}

spirallab_status spirallab_vc_query(const char* request_json, char** json_out) {
  if (auto rc = require(request_json && json_out, "vc_query: null argument")) return rc;
  return guarded([&] {
    using nlohmann::json;
    const json req = json::parse(request_json);
    const std::string op = req.at("op").get<std::string>();
    json res;
    res["op"] = op;

    if (op == "bracket") {
      const auto p = req.at("p").get<std::size_t>();
      const auto eps = req.at("eps").get<double>();
      const auto net = spirallab::vcfam::bracket_net_rects(p, eps);
      const auto mu = spirallab::spiral::MeasureSpec::lebesgue(p);
      double max_width = 0.0;
      auto brackets = json::array();
      for (const auto& b : net.brackets) {
        max_width = std::max(max_width, spirallab::vcfam::bracket_width(b, mu));
        brackets.push_back({{"lower", b.lower.upper}, {"upper", b.upper.upper}});
      }
      res["eps"] = eps;
      res["count"] = net.brackets.size();
      res["max_width"] = max_width;
      res["brackets"] = std::move(brackets);
      *json_out = dup_string(res.dump(2));
      if (!*json_out) throw std::bad_alloc();
      return;
    }

    if (op == "cover") {
      const auto p = req.at("p").get<std::size_t>();
      const auto eps = req.at("eps").get<double>();
      const auto resolution = req.value("net_resolution", std::size_t{100});
      const auto sample_n = req.value("sample_grid", std::size_t{1000});
      const auto net = spirallab::spiral::lattice_net(p, resolution);
      // Deterministic midpoint grid sample of ~sample_n points.
      const std::size_t per_axis = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(
                 std::pow(static_cast<double>(sample_n), 1.0 / static_cast<double>(p)))));
      std::vector<std::vector<double>> sample;
      std::vector<std::size_t> idx(p, 0);
      for (;;) {
        std::vector<double> pt(p);
        for (std::size_t a = 0; a < p; ++a) {
          pt[a] = (static_cast<double>(idx[a]) + 0.5) / static_cast<double>(per_axis);
        }
        sample.push_back(std::move(pt));
        std::size_t a = p;
        bool done = false;
        for (; a-- > 0;) {
          if (++idx[a] < per_axis) break;
          idx[a] = 0;
          if (a == 0) done = true;
        }
        if (done) break;
      }
      res["eps"] = eps;
      res["net_size"] = net.size();
      res["sample_size"] = sample.size();
      res["centers"] = spirallab::vcfam::covering_number_L1(net, sample, eps);
      *json_out = dup_string(res.dump(2));
      if (!*json_out) throw std::bad_alloc();
      return;
    }

    const auto family = family_from_json(req.at("family"));
    res["family"] = family.name();
    if (op == "dim") {
      const auto variant = req.value("variant", std::string("some")) == "all"
                               ? spirallab::vcfam::VcVariant::All
                               : spirallab::vcfam::VcVariant::Some;
      const auto budget = req.value("budget", std::size_t{10000});
      const auto result = spirallab::vcfam::vc_dim(family, variant, budget);
      res["variant"] = variant == spirallab::vcfam::VcVariant::All ? "all" : "some";
      res["budget"] = budget;
      res["value"] = result.value;
      res["exact"] = result.exact;
      res["budget_exhausted"] = result.budget_exhausted;
      res["display"] = result.display();
    } else if (op == "traces" || op == "shatters") {
      const auto points = req.at("points").get<std::vector<std::vector<double>>>();
      const auto tr = spirallab::vcfam::traces(family, points);
      if (op == "shatters") {
        res["shatters"] = tr.size() == (std::size_t{1} << points.size());
      }
      auto arr = json::array();
      for (std::uint32_t mask : tr) {
        auto subset = json::array();
        for (std::size_t i = 0; i < points.size(); ++i) {
          if ((mask >> i) & 1u) subset.push_back(i);
        }
        arr.push_back(std::move(subset));
      }
      res["traces"] = std::move(arr);
      res["trace_count"] = tr.size();
    } else {
      throw std::invalid_argument("vc_query: unknown op '" + op +
                                  "' (expected dim|traces|shatters|cover|bracket)");
    }
    *json_out = dup_string(res.dump(2));
    if (!*json_out) throw std::bad_alloc();
  });
}

spirallab_status spirallab_experiment_run(const char* config_json, spirallab_report** out) {
  if (auto rc = require(config_json && out, "experiment_run: null argument")) return rc;
  return guarded([&] {
    const auto cfg =
        spirallab::experiment::ExperimentConfig::from_json(nlohmann::json::parse(config_json));
    *out = new spirallab_report{spirallab::experiment::run_experiment(cfg)};
  });
}

spirallab_status spirallab_report_write_csv(const spirallab_report* report, const char* path) {
  if (auto rc = require(report && path, "report_write_csv: null argument")) return rc;
  return guarded([&] { spirallab::experiment::emit_csv(report->report, path); });
}

spirallab_status spirallab_report_write_json(const spirallab_report* report, const char* path) {
  if (auto rc = require(report && path, "report_write_json: null argument")) return rc;
  return guarded([&] { spirallab::experiment::emit_json(report->report, path); });
}

spirallab_status spirallab_report_to_json(const spirallab_report* report, char** json_out) {
  if (auto rc = require(report && json_out, "report_to_json: null argument")) return rc;
  return guarded([&] {
    *json_out = dup_string(spirallab::experiment::report_json_string(report->report));
    if (!*json_out) throw std::bad_alloc();
  });
}

void spirallab_report_free(spirallab_report* report) { delete report; }

}  // extern "C"
