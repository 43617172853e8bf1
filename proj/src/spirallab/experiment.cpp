#include "spirallab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "spirallab/multisum.hpp"
#include "spirallab/setsum.hpp"
#include "spirallab/vcfam.hpp"

namespace spirallab::experiment {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPIRAL_LAB_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

}  // namespace

NRule NRule::parse(const std::string& text) {
  NRule r;
  if (text == "d") {
    r.kind = Kind::D;
  } else if (text == "sqrt_d") {
    r.kind = Kind::SqrtD;
  } else if (text.rfind("fixed:", 0) == 0) {
    r.kind = Kind::Fixed;
    try {
      r.fixed_n = std::stoul(text.substr(6));
    } catch (const std::exception&) {
      throw std::invalid_argument("n_rule: unparsable fixed value in '" + text + "'");
    }
  } else if (text.rfind("pow:", 0) == 0) {
    r.kind = Kind::Pow;
    try {
      r.alpha = std::stod(text.substr(4));
    } catch (const std::exception&) {
      throw std::invalid_argument("n_rule: unparsable exponent in '" + text + "'");
    }
    if (!(r.alpha > 0.0 && r.alpha <= 2.0)) {
      throw std::invalid_argument("n_rule: pow exponent must lie in (0,2]");
    }
  } else {
    throw std::invalid_argument("n_rule: unknown rule '" + text +
                                "' (expected fixed:<n>|d|sqrt_d|pow:<alpha>)");
  }
  return r;
}

std::string NRule::to_string() const {
  switch (kind) {
    case Kind::Fixed: return "fixed:" + std::to_string(fixed_n);
    case Kind::D: return "d";
    case Kind::SqrtD: return "sqrt_d";
    case Kind::Pow: return "pow:" + std::to_string(alpha);
  }
  return "?";
}

std::size_t NRule::apply(std::size_t d) const {
  switch (kind) {
    case Kind::Fixed: return fixed_n;
    case Kind::D: return d;
    case Kind::SqrtD:
      return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    case Kind::Pow:
      return static_cast<std::size_t>(
          std::ceil(std::pow(static_cast<double>(d), alpha)));
  }
  return 1;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> issues;
  if (d_list.empty()) issues.push_back("d_list: must be nonempty");
  for (std::size_t i = 0; i + 1 < d_list.size(); ++i) {
    if (d_list[i] >= d_list[i + 1]) {
      issues.push_back("d_list: must be strictly increasing (violated at position " +
                       std::to_string(i + 1) + ")");
      break;
    }
  }
  for (std::size_t d : d_list) {
    if (d == 0) issues.push_back("d_list: dimensions must be positive");
    if (gen.kind == increments::GeneratorKind::AnisoBad && d < 2) {
      issues.push_back("d_list: aniso generator needs d >= 2");
    }
  }
  if (reps == 0) issues.push_back("reps: must be at least 1");
  if (index_dim == 0) issues.push_back("index_dim: must be positive");
  if (setting == Setting::SI && measure.dim() != index_dim) {
    issues.push_back("measure: dimension must equal index_dim");
  }
  if (setting == Setting::SI && family != "llrects" && family != "net") {
    issues.push_back("family: must be 'llrects' or 'net'");
  }
  if (net_resolution == 0) issues.push_back("net_resolution: must be positive");
  if (format != "csv" && format != "json") issues.push_back("format: must be 'csv' or 'json'");
  std::size_t prev_n = 0;
  for (std::size_t d : d_list) {
    const std::size_t n = n_rule.apply(d);
    if (n == 0) issues.push_back("n_rule: yields n = 0 at d = " + std::to_string(d));
    if (n < prev_n) {
      issues.push_back("n_rule: n(d) must be nondecreasing along d_list");
      break;
    }
    prev_n = n;
  }
  if (gen.kind == increments::GeneratorKind::AnisoBad &&
      !(gen.theta > 0.0 && gen.theta < 1.0)) {
    issues.push_back("generator: aniso theta must lie strictly inside (0,1)");
  }
  if (!issues.empty()) {
    std::string msg = "invalid experiment config:";
    for (const auto& s : issues) msg += "\n  - " + s;
    throw std::invalid_argument(msg);
  }
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  const std::string setting = j.at("setting").get<std::string>();
  if (setting == "ms" || setting == "MS") {
    cfg.setting = Setting::MS;
  } else if (setting == "si" || setting == "SI") {
    cfg.setting = Setting::SI;
  } else {
    throw std::invalid_argument("setting: must be 'ms' or 'si'");
  }
  cfg.index_dim = j.at("index_dim").get<std::size_t>();
  cfg.d_list = j.at("d_list").get<std::vector<std::size_t>>();
  cfg.n_rule = NRule::parse(j.at("n_rule").get<std::string>());
  cfg.reps = j.at("reps").get<std::size_t>();
  cfg.gen = increments::GeneratorSpec::parse(j.at("generator").get<std::string>(), 0);
  cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("measure")) {
    const auto& m = j.at("measure");
    const std::string kind = m.at("kind").get<std::string>();
    if (kind == "lebesgue") {
      cfg.measure = spiral::MeasureSpec::lebesgue(m.value("p", cfg.index_dim));
    } else if (kind == "dirac") {
      cfg.measure = spiral::MeasureSpec::dirac(m.at("x").get<std::vector<double>>());
    } else if (kind == "discrete") {
      cfg.measure = spiral::MeasureSpec::discrete(
          m.at("points").get<std::vector<std::vector<double>>>(),
          m.at("weights").get<std::vector<double>>());
    } else {
      throw std::invalid_argument("measure.kind: must be lebesgue|dirac|discrete");
    }
  } else if (cfg.setting == Setting::SI) {
    cfg.measure = spiral::MeasureSpec::lebesgue(cfg.index_dim);
  }
  cfg.family = j.value("family", std::string("llrects"));
  cfg.net_resolution = j.value("net_resolution", std::size_t{20});
  cfg.out_path = j.value("out", std::string());
  cfg.format = j.value("format", std::string("csv"));
  cfg.threads = j.value("threads", std::size_t{0});
  cfg.timing = j.value("timing", false);
  cfg.validate();
  return cfg;
}

nlohmann::json ExperimentConfig::echo_json() const {
  nlohmann::json j;
  j["setting"] = setting == Setting::MS ? "ms" : "si";
  j["index_dim"] = index_dim;
  j["d_list"] = d_list;
  j["n_rule"] = n_rule.to_string();
  j["reps"] = reps;
  j["generator"] = gen.name();
  j["master_seed"] = master_seed;
  j["timing"] = timing;
  if (setting == Setting::SI) {
    nlohmann::json m;
    switch (measure.kind()) {
      case spiral::MeasureKind::LebesgueCube:
        m["kind"] = "lebesgue";
        m["p"] = measure.dim();
        break;
      case spiral::MeasureKind::Dirac:
        m["kind"] = "dirac";
        m["x"] = std::vector<double>(measure.dirac_point().begin(), measure.dirac_point().end());
        break;
      case spiral::MeasureKind::Discrete:
        m["kind"] = "discrete";
        m["points"] = measure.points();
        m["weights"] = measure.weights();
        break;
    }
    j["measure"] = m;
    j["family"] = family;
    j["net_resolution"] = net_resolution;
  }
  return j;
}

std::uint64_t row_seed(std::uint64_t master, std::size_t d_index, std::size_t rep) {
  return rng::derive_stream(rng::derive_stream(master, d_index), rep);
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must lie in [0,1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

ReportRow compute_row(const ExperimentConfig& cfg, std::size_t d_index, std::size_t rep) {
  const std::size_t d = cfg.d_list[d_index];
  const std::size_t n = cfg.n_rule.apply(d);
  const std::uint64_t seed = row_seed(cfg.master_seed, d_index, rep);
  const increments::SeedSpec seed_spec{seed, 0};
  const auto gen = cfg.gen.with_dim(d);

  ReportRow row;
  row.d = d;
  row.n = n;
  row.idxdim = cfg.index_dim;
  row.rep = rep;
  row.seed = seed;

  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.setting == Setting::MS) {
    const auto inc = multisum::IncrementTensor::sample(gen, cfg.index_dim, n, seed_spec);
    const auto pref = multisum::prefix_sums(inc);
    row.dev_sup = multisum::deviation_sup_exact(pref);
    row.dev_sup_root = row.dev_sup;
    row.dev_exact = true;
    std::vector<std::size_t> full(cfg.index_dim, n);
    row.q_stat = multisum::q_stat(pref, inc, full);
    row.gh_bound = multisum::ms_gh_report(pref);
  } else {
    const auto sample = setsum::sample_marked(gen, cfg.measure, n, seed_spec);
    const bool exact_eligible = cfg.family == "llrects" && cfg.index_dim <= 2 &&
                                cfg.measure.kind() == spiral::MeasureKind::LebesgueCube;
    setsum::DeviationResult dev;
    if (exact_eligible) {
      dev = setsum::si_deviation_sup(
          sample, vcfam::FamilySpec::lower_left_rects(cfg.index_dim), cfg.measure);
    } else {
      dev = setsum::si_deviation_sup_net(
          sample, spiral::lattice_net(cfg.index_dim, cfg.net_resolution), cfg.measure);
    }
    row.dev_sup = dev.sup_sq;
    row.dev_sup_root = dev.sup_root;
    row.dev_exact = dev.exact;
    row.q_stat = setsum::si_cross_term(sample, spiral::RectSet(std::vector<double>(cfg.index_dim, 1.0)));
    row.gh_bound = setsum::si_gh_report(
        sample, spiral::lattice_net(cfg.index_dim, cfg.net_resolution), cfg.measure);
  }
  if (cfg.timing) {
    const auto t1 = std::chrono::steady_clock::now();
    row.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  return row;
}

std::vector<Aggregate> build_aggregates(const ExperimentConfig& cfg,
                                        const std::vector<ReportRow>& rows) {
  std::vector<Aggregate> out;
  for (std::size_t di = 0; di < cfg.d_list.size(); ++di) {
    const std::size_t d = cfg.d_list[di];
    const std::size_t n = cfg.n_rule.apply(d);
    const auto collect = [&](auto getter) {
      std::vector<double> vals;
      vals.reserve(cfg.reps);
      for (std::size_t r = 0; r < cfg.reps; ++r) vals.push_back(getter(rows[di * cfg.reps + r]));
      std::sort(vals.begin(), vals.end());
      return vals;
    };
    const auto push = [&](const char* stat, const std::vector<double>& vals) {
      out.push_back({d, n, stat, quantile(vals, 0.5), quantile(vals, 0.25), quantile(vals, 0.75)});
    };
    push("dev_sup", collect([](const ReportRow& r) { return r.dev_sup; }));
    push("q_stat", collect([](const ReportRow& r) { return r.q_stat; }));
    push("gh_bound", collect([](const ReportRow& r) { return r.gh_bound; }));
  }
  return out;
}

}  // namespace

DeviationReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t cells = cfg.d_list.size() * cfg.reps;

  DeviationReport report;
  report.config = cfg;
  report.rows.resize(cells);

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells) return;
      try {
        report.rows[i] = compute_row(cfg, i / cfg.reps, i % cfg.reps);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(cells);
        return;
      }
    }
  };

  const std::size_t nthreads = std::min(resolve_threads(cfg.threads), cells);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  report.aggregates = build_aggregates(cfg, report.rows);
  return report;
}

namespace {

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw std::runtime_error("emit: cannot open " + tmp + " for writing");
    const std::size_t written = std::fwrite(content.data(), 1, content.size(), f);
    const int rc = std::fclose(f);
    if (written != content.size() || rc != 0) {
      std::remove(tmp.c_str());
      throw std::runtime_error("emit: short write to " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("emit: cannot rename " + tmp + " to " + path);
  }
}

std::string csv_string(const DeviationReport& report) {
  std::string out;
  out += "# spiral-lab report v1\n";
  out += "# config: " + report.config.echo_json().dump() + "\n";
  out += "d,n,idxdim,rep,seed,dev_sup,q_stat,gh_bound,elapsed_ms\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.d) + "," + std::to_string(r.n) + "," + std::to_string(r.idxdim) +
           "," + std::to_string(r.rep) + "," + std::to_string(r.seed) + "," + fmt17(r.dev_sup) +
           "," + fmt17(r.q_stat) + "," + fmt17(r.gh_bound) + "," + fmt17(r.elapsed_ms) + "\n";
  }
  for (const auto& a : report.aggregates) {
    out += "# agg,d=" + std::to_string(a.d) + ",n=" + std::to_string(a.n) + ",stat=" + a.stat +
           ",median=" + fmt17(a.median) + ",q25=" + fmt17(a.q25) + ",q75=" + fmt17(a.q75) + "\n";
  }
  return out;
}

nlohmann::json report_json(const DeviationReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "spiral-lab-report";
  j["config"] = report.config.echo_json();
  auto rows = nlohmann::json::array();
  const bool si = report.config.setting == Setting::SI;
  for (const auto& r : report.rows) {
    nlohmann::json row;
    row["d"] = r.d;
    row["n"] = r.n;
    row["idxdim"] = r.idxdim;
    row["rep"] = r.rep;
    row["seed"] = r.seed;
    row["dev_sup"] = r.dev_sup;
    row["q_stat"] = r.q_stat;
    row["gh_bound"] = r.gh_bound;
    row["elapsed_ms"] = r.elapsed_ms;
    if (si) {
      row["dev_sup_root"] = r.dev_sup_root;
      row["dev_mode"] = r.dev_exact ? "exact" : "net";
      row["net_gap"] = r.dev_exact ? 0.0
                                   : static_cast<double>(report.config.index_dim) /
                                         static_cast<double>(report.config.net_resolution);
    }
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  auto aggs = nlohmann::json::array();
  for (const auto& a : report.aggregates) {
    aggs.push_back({{"d", a.d},
                    {"n", a.n},
                    {"stat", a.stat},
                    {"median", a.median},
                    {"q25", a.q25},
                    {"q75", a.q75}});
  }
  j["aggregates"] = std::move(aggs);
  return j;
}

}  // namespace

void emit_csv(const DeviationReport& report, const std::string& path) {
  atomic_write(path, csv_string(report));
}

void emit_json(const DeviationReport& report, const std::string& path) {
  atomic_write(path, report_json(report).dump(2) + "\n");
}

std::string report_json_string(const DeviationReport& report) {
  return report_json(report).dump(2);
}

void emit(const DeviationReport& report) {
  if (report.config.out_path.empty()) {
    throw std::invalid_argument("emit: config has no out path");
  }
  if (report.config.format == "json") {
    emit_json(report, report.config.out_path);
  } else {
    emit_csv(report, report.config.out_path);
  }
}

}  // namespace spirallab::experiment
