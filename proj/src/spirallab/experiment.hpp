#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "spirallab/increments.hpp"
#include "spirallab/spiral.hpp"

namespace spirallab::experiment {

enum class Setting { MS, SI };

// n(d) schedule. The limit theory only asks that n(d) grows, so the rule is
// a config knob: "fixed:<n>", "d", "sqrt_d" (ceil of sqrt), "pow:<alpha>"
// (ceil of d^alpha).
struct NRule {
  enum class Kind { Fixed, D, SqrtD, Pow } kind = Kind::D;
  std::size_t fixed_n = 1;
  double alpha = 0.5;

  static NRule parse(const std::string& text);
  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] std::size_t apply(std::size_t d) const;
};

struct ExperimentConfig {
  Setting setting = Setting::MS;
  std::size_t index_dim = 1;  // m in the MS setting, p in the SI setting
  std::vector<std::size_t> d_list;
  NRule n_rule;
  std::size_t reps = 1;
  increments::GeneratorSpec gen;       // dim is filled per d at run time
  spiral::MeasureSpec measure = spiral::MeasureSpec::lebesgue(1);  // SI only
  std::string family = "llrects";      // SI: "llrects" (exact when eligible) or "net"
  std::size_t net_resolution = 20;     // per-axis subdivisions of the GH / net-mode lattice
  std::uint64_t master_seed = 0;
  std::string out_path;
  std::string format = "csv";
  std::size_t threads = 0;  // 0: SPIRAL_LAB_THREADS env var, then hardware
  bool timing = false;      // off by default so the CSV stays byte-reproducible

  void validate() const;  // collects all violations, reported with field paths
  static ExperimentConfig from_json(const nlohmann::json& j);
  // Echo of the semantic fields only; execution details (threads, out_path,
  // format) are excluded so reruns at different thread counts emit
  // byte-identical artifacts.
  [[nodiscard]] nlohmann::json echo_json() const;
};

struct ReportRow {
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t idxdim = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  double dev_sup = 0.0;       // MS: Theorem-2 statistic; SI: squared-form sup
  double q_stat = 0.0;        // MS: Q at n*1; SI: cross term of the full cube
  double gh_bound = 0.0;
  double elapsed_ms = 0.0;
  double dev_sup_root = 0.0;  // SI only: root-form sup
  bool dev_exact = true;
};

struct Aggregate {
  std::size_t d = 0;
  std::size_t n = 0;
  std::string stat;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct DeviationReport {
  ExperimentConfig config;
  std::vector<ReportRow> rows;         // in (d, rep) order
  std::vector<Aggregate> aggregates;   // per d for dev_sup, q_stat, gh_bound
};

// Replicate seed: derive_stream(derive_stream(master, d_index), rep).
[[nodiscard]] std::uint64_t row_seed(std::uint64_t master, std::size_t d_index, std::size_t rep);

// Linear interpolation between closest ranks on a sorted sample:
// position q*(count-1), value v[lo] + frac*(v[lo+1]-v[lo]).
[[nodiscard]] double quantile(const std::vector<double>& sorted, double q);

// Runs the (d, rep) grid on a worker pool. Rows land in preallocated slots,
// so the result is bit-identical for identical configs at any thread count.
DeviationReport run_experiment(const ExperimentConfig& cfg);

// Atomic writes (temp file + rename). The CSV carries the fixed header
// d,n,idxdim,rep,seed,dev_sup,q_stat,gh_bound,elapsed_ms and ends with an
// aggregate block.
void emit_csv(const DeviationReport& report, const std::string& path);
void emit_json(const DeviationReport& report, const std::string& path);
[[nodiscard]] std::string report_json_string(const DeviationReport& report);

// Emits to report.config.out_path in report.config.format.
void emit(const DeviationReport& report);

}  // namespace spirallab::experiment
