// spiral-lab command line: experiment sweeps, GH comparisons, spiral nets,
// generator diagnostics and VC-family queries, all through the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spirallab.h"

namespace {

using nlohmann::json;

[[noreturn]] void die(const std::string& context) {
  std::cerr << "error: " << context;
  const char* detail = spirallab_last_error();
  if (detail != nullptr && detail[0] != '\0') std::cerr << ": " << detail;
  std::cerr << "\n";
  std::exit(1);
}

void check(spirallab_status rc, const std::string& context) {
  if (rc != SPIRALLAB_OK) die(context);
}

std::vector<std::size_t> parse_d_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stoul(cell));
    } catch (const std::exception&) {
      std::cerr << "error: unparsable d-list entry '" << cell << "'\n";
      std::exit(1);
    }
  }
  return out;
}

json measure_flag_to_json(const std::string& text, std::size_t p) {
  if (text == "lebesgue") return {{"kind", "lebesgue"}, {"p", p}};
  if (text.rfind("dirac:", 0) == 0) {
    std::vector<double> x;
    std::stringstream ss(text.substr(6));
    std::string cell;
    while (std::getline(ss, cell, ',')) x.push_back(std::stod(cell));
    return {{"kind", "dirac"}, {"x", x}};
  }
  if (text.rfind("discrete:", 0) == 0) {
    const std::string path = text.substr(9);
    std::ifstream in(path);
    if (!in) {
      std::cerr << "error: cannot open measure file " << path << "\n";
      std::exit(1);
    }
    json spec = json::parse(in);
    spec["kind"] = "discrete";
    return spec;
  }
  std::cerr << "error: unknown measure '" << text
            << "' (expected lebesgue|dirac:<coords>|discrete:<file>)\n";
  std::exit(1);
}

// Points flag: semicolon-separated points, comma-separated coordinates,
// e.g. "0.3;0.7" or "0.1,0.2;0.5,0.5".
json points_flag_to_json(const std::string& text) {
  json pts = json::array();
  std::stringstream ss(text);
  std::string point;
  while (std::getline(ss, point, ';')) {
    json coords = json::array();
    std::stringstream ps(point);
    std::string cell;
    while (std::getline(ps, cell, ',')) coords.push_back(std::stod(cell));
    pts.push_back(std::move(coords));
  }
  return pts;
}

void print_report_summary(const spirallab_report* report) {
  char* text = nullptr;
  check(spirallab_report_to_json(report, &text), "rendering report");
  const json j = json::parse(text);
  spirallab_string_free(text);
  std::cout << "per-d aggregates (median [q25, q75]):\n";
  for (const auto& agg : j.at("aggregates")) {
    std::printf("  d=%-6llu n=%-6llu %-9s %.6g  [%.6g, %.6g]\n",
                static_cast<unsigned long long>(agg.at("d").get<std::uint64_t>()),
                static_cast<unsigned long long>(agg.at("n").get<std::uint64_t>()),
                agg.at("stat").get<std::string>().c_str(), agg.at("median").get<double>(),
                agg.at("q25").get<double>(), agg.at("q75").get<double>());
  }
}

void run_experiment_command(const json& cfg, const std::string& out_path,
                            const std::string& format) {
  spirallab_report* report = nullptr;
  check(spirallab_experiment_run(cfg.dump().c_str(), &report), "running experiment");
  if (format == "json") {
    check(spirallab_report_write_json(report, out_path.c_str()), "writing " + out_path);
  } else {
    check(spirallab_report_write_csv(report, out_path.c_str()), "writing " + out_path);
  }
  std::cout << "wrote " << out_path << "\n";
  print_report_summary(report);
  spirallab_report_free(report);
}

struct SweepFlags {
  std::size_t index_dim = 1;
  std::string d_list = "25,100,400";
  std::string n = "auto";
  std::string n_rule;
  std::size_t reps = 30;
  std::string gen = "sphere";
  std::uint64_t seed = 1;
  std::string out = "report.csv";
  std::string format = "csv";
  std::size_t threads = 0;
  bool timing = false;
  std::string config_path;
  std::string mu = "lebesgue";
  std::string family = "llrects";
  std::size_t net = 20;
};

void add_common_flags(CLI::App* cmd, SweepFlags& f) {
  cmd->add_option("--d-list", f.d_list, "comma-separated ambient dimensions");
  cmd->add_option("--n", f.n, "side length: integer or 'auto' (per-setting default rule)");
  cmd->add_option("--n-rule", f.n_rule, "n(d) rule: fixed:<n>|d|sqrt_d|pow:<alpha>");
  cmd->add_option("--reps", f.reps, "replicates per dimension");
  cmd->add_option("--gen", f.gen, "sphere|gauss|rademacher|coord|aniso:<theta>");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output path");
  cmd->add_option("--format", f.format, "csv|json");
  cmd->add_option("--threads", f.threads, "worker threads (0: SPIRAL_LAB_THREADS or hardware)");
  cmd->add_flag("--timing", f.timing, "record wall-clock per replicate (breaks byte-identical reruns)");
  cmd->add_option("--config", f.config_path, "JSON config file; explicit flags override its fields");
}

json sweep_config(const CLI::App* cmd, const SweepFlags& f, bool si) {
  json cfg;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) {
      std::cerr << "error: cannot open config " << f.config_path << "\n";
      std::exit(1);
    }
    cfg = json::parse(in);
  }
  const auto set_if = [&](const char* flag, const char* key, auto value) {
    if (cfg.contains(key) && cmd->count(flag) == 0) return;
    cfg[key] = value;
  };
  cfg["setting"] = si ? "si" : "ms";
  set_if(si ? "--p" : "--m", "index_dim", f.index_dim);
  set_if("--d-list", "d_list", parse_d_list(f.d_list));
  set_if("--reps", "reps", f.reps);
  set_if("--gen", "generator", f.gen);
  set_if("--seed", "master_seed", f.seed);
  set_if("--threads", "threads", f.threads);
  if (f.timing) cfg["timing"] = true;

  if (!cfg.contains("n_rule") || cmd->count("--n-rule") > 0 || cmd->count("--n") > 0) {
    std::string rule;
    if (cmd->count("--n-rule") > 0) {
      rule = f.n_rule;
    } else if (f.n != "auto") {
      rule = "fixed:" + f.n;
    } else {
      const std::size_t idx = cfg["index_dim"].get<std::size_t>();
      rule = (!si && idx >= 2) ? "sqrt_d" : "d";
    }
    cfg["n_rule"] = rule;
  }
  if (si) {
    const std::size_t p = cfg["index_dim"].get<std::size_t>();
    set_if("--mu", "measure", measure_flag_to_json(f.mu, p));
    set_if("--family", "family", f.family);
    set_if("--net", "net_resolution", f.net);
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spiral-lab: high-dimensional random-sum metric geometry toolkit"};
  app.require_subcommand(1);

  // ms-run
  SweepFlags ms;
  auto* ms_cmd = app.add_subcommand("ms-run", "multiple-sums sweep over d");
  ms_cmd->add_option("--m", ms.index_dim, "lattice index dimension m");
  add_common_flags(ms_cmd, ms);

  // si-run
  SweepFlags si;
  si.d_list = "32,128,512";
  auto* si_cmd = app.add_subcommand("si-run", "set-indexed sweep over d");
  si_cmd->add_option("--p", si.index_dim, "mark dimension p");
  si_cmd->add_option("--mu", si.mu, "lebesgue|dirac:<coords>|discrete:<file>");
  si_cmd->add_option("--family", si.family, "llrects (exact sup when eligible) | net");
  si_cmd->add_option("--net", si.net, "per-axis lattice resolution for nets");
  add_common_flags(si_cmd, si);

  // gh
  std::string gh_a, gh_b, gh_mode = "auto";
  auto* gh_cmd = app.add_subcommand("gh", "Gromov-Hausdorff distance between two fms CSV files");
  gh_cmd->add_option("fileA", gh_a)->required();
  gh_cmd->add_option("fileB", gh_b)->required();
  gh_cmd->add_option("--mode", gh_mode, "auto|exact|bound");

  // vc
  std::string vc_family = "intervals", vc_op = "dim", vc_variant = "some";
  std::string vc_points, vc_file;
  std::size_t vc_budget = 10000, vc_p = 1, vc_net = 100, vc_sample = 1000;
  double vc_eps = 0.25;
  auto* vc_cmd = app.add_subcommand("vc", "VC-family queries");
  vc_cmd->add_option("--family", vc_family, "intervals|llrects|axisrects|halfplanes|finite");
  vc_cmd->add_option("--p", vc_p, "dimension for llrects/axisrects/bracket/cover");
  vc_cmd->add_option("--file", vc_file, "finite family JSON ({\"ground_size\":..,\"sets\":[..]})");
  vc_cmd->add_option("--op", vc_op, "dim|traces|shatters|cover|bracket");
  vc_cmd->add_option("--variant", vc_variant, "some|all");
  vc_cmd->add_option("--budget", vc_budget, "candidate budget for dim");
  vc_cmd->add_option("--points", vc_points, "points, e.g. '0.3;0.7' or '0.1,0.2;0.5,0.5'");
  vc_cmd->add_option("--eps", vc_eps, "width/radius for bracket and cover");
  vc_cmd->add_option("--net", vc_net, "net resolution for cover");
  vc_cmd->add_option("--sample", vc_sample, "empirical sample size for cover");

  // validate-gen
  std::string vg_gen = "sphere";
  std::size_t vg_d = 64, vg_reps = 10000;
  std::uint64_t vg_seed = 1;
  auto* vg_cmd = app.add_subcommand("validate-gen", "empirical generator condition report");
  vg_cmd->add_option("--gen", vg_gen, "sphere|gauss|rademacher|coord|aniso:<theta>");
  vg_cmd->add_option("--d", vg_d, "ambient dimension");
  vg_cmd->add_option("--reps", vg_reps, "replicates (>= 1000)");
  vg_cmd->add_option("--seed", vg_seed, "seed");

  // spiral-net
  std::size_t sn_m = 1, sn_n = 10;
  std::string sn_mu = "lebesgue", sn_out = "net.csv";
  auto* sn_cmd = app.add_subcommand("spiral-net", "emit a lattice spiral net as fms CSV");
  sn_cmd->add_option("--m", sn_m, "index dimension");
  sn_cmd->add_option("--n", sn_n, "per-axis subdivisions");
  sn_cmd->add_option("--mu", sn_mu, "lebesgue|dirac:<coords>|discrete:<file>");
  sn_cmd->add_option("--out", sn_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  if (ms_cmd->parsed()) {
    run_experiment_command(sweep_config(ms_cmd, ms, false), ms.out, ms.format);
    return 0;
  }

  if (si_cmd->parsed()) {
    run_experiment_command(sweep_config(si_cmd, si, true), si.out, si.format);
    return 0;
  }

  if (gh_cmd->parsed()) {
    spirallab_fms* a = nullptr;
    spirallab_fms* b = nullptr;
    check(spirallab_fms_read_csv(gh_a.c_str(), &a), "reading " + gh_a);
    check(spirallab_fms_read_csv(gh_b.c_str(), &b), "reading " + gh_b);
    const long long cells =
        static_cast<long long>(spirallab_fms_size(a)) * spirallab_fms_size(b);
    double value = 0.0;
    if (gh_mode == "exact" || (gh_mode == "auto" && cells <= 25)) {
      check(spirallab_gh_exact(a, b, &value), "gh_exact");
      std::printf("gh_exact = %.17g\n", value);
    } else if (gh_mode == "bound" || gh_mode == "auto") {
      check(spirallab_gh_canonical_bound(a, b, &value), "gh_upper_bound");
      std::printf("gh_upper_bound = %.17g (canonical correspondence)\n", value);
    } else {
      std::cerr << "error: unknown gh mode '" << gh_mode << "'\n";
      return 1;
    }
    spirallab_fms_free(a);
    spirallab_fms_free(b);
    return 0;
  }

  if (vc_cmd->parsed()) {
    json req;
    req["op"] = vc_op;
    if (vc_op == "bracket" || vc_op == "cover") {
      req["p"] = vc_p;
      req["eps"] = vc_eps;
      req["net_resolution"] = vc_net;
      req["sample_grid"] = vc_sample;
    } else {
      if (vc_family == "finite") {
        std::ifstream in(vc_file);
        if (!in) {
          std::cerr << "error: cannot open finite family file " << vc_file << "\n";
          return 1;
        }
        json spec = json::parse(in);
        spec["kind"] = "finite";
        req["family"] = spec;
      } else if (vc_family == "llrects" || vc_family == "axisrects") {
        req["family"] = {{"kind", vc_family}, {"p", vc_p}};
      } else {
        req["family"] = vc_family;
      }
      req["variant"] = vc_variant;
      req["budget"] = vc_budget;
      if (!vc_points.empty()) req["points"] = points_flag_to_json(vc_points);
    }
    char* out = nullptr;
    check(spirallab_vc_query(req.dump().c_str(), &out), "vc query");
    std::cout << out << "\n";
    spirallab_string_free(out);
    return 0;
  }

  if (vg_cmd->parsed()) {
    char* out = nullptr;
    check(spirallab_validate_generator(vg_gen.c_str(), static_cast<int>(vg_d),
                                       static_cast<int>(vg_reps), vg_seed, &out),
          "validate-gen");
    std::cout << out << "\n";
    spirallab_string_free(out);
    return 0;
  }

  if (sn_cmd->parsed()) {
    const json mu = measure_flag_to_json(sn_mu, sn_m);
    spirallab_fms* net = nullptr;
    check(spirallab_spiral_net_lattice(static_cast<int>(sn_m), static_cast<int>(sn_n),
                                       mu.dump().c_str(), &net),
          "building spiral net");
    check(spirallab_fms_write_csv(net, sn_out.c_str()), "writing " + sn_out);
    std::printf("wrote %s (%d points)\n", sn_out.c_str(), spirallab_fms_size(net));
    spirallab_fms_free(net);
    return 0;
  }

  return 0;
}
