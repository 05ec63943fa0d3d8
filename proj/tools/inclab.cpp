#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "inclab/covariance.hpp"
#include "inclab/incoherence.hpp"
#include "inclab/json_io.hpp"
#include "inclab/sampling.hpp"
#include "inclab/suites.hpp"
#include "inclab/types.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw inclab::ParseError("cannot open " + tmp + " for writing");
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

struct ManifestScope {
  inclab::Json manifest;
  std::string path;

  ManifestScope(const std::string& command, const std::string& manifest_path) {
    manifest["command"] = command;
    manifest["tool_version"] = kToolVersion;
    manifest["started_at"] = timestamp_now();
    manifest["parameters"] = inclab::Json::object();
    manifest["outputs"] = inclab::Json::array();
    path = manifest_path;
  }
  void set_param(const std::string& key, const inclab::Json& value) {
    manifest["parameters"][key] = value;
  }
  void add_output(const std::string& file) { manifest["outputs"].push_back(file); }
  void finish(const std::string& error = "") {
    manifest["finished_at"] = timestamp_now();
    if (!error.empty()) manifest["error"] = error;
    try {
      write_text_atomic(path, manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
      std::cerr << "warning: cannot write manifest " << path << ": " << e.what() << "\n";
    }
  }
};

std::vector<int> parse_support_spec(const std::string& spec) {
  const auto dots = spec.find("..");
  std::vector<int> out;
  if (dots != std::string::npos) {
    const int lo = std::stoi(spec.substr(0, dots));
    const int hi = std::stoi(spec.substr(dots + 2));
    if (hi < lo) throw inclab::ParseError("empty support range '" + spec + "'");
    for (int i = lo; i <= hi; ++i) out.push_back(i);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto next = spec.find(',', pos);
    const std::string token =
        spec.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (token.empty()) throw inclab::ParseError("empty token in support spec '" + spec + "'");
    out.push_back(std::stoi(token));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

inclab::Spread parse_spread(const std::string& text) {
  if (text == "inf") return inclab::Spread::infinite();
  return inclab::Spread::finite(std::stod(text));
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find(',', pos);
    out.push_back(std::stoi(
        text.substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

int run_check(const std::string& matrix_path, const std::string& support_spec, double rho,
              const std::string& spread_text, double delta, const std::string& condition,
              ManifestScope& scope) {
  const inclab::CovMatrix sigma = inclab::read_matrix_csv(matrix_path);
  const inclab::Support support(parse_support_spec(support_spec), sigma.dim());
  const inclab::Spread spread = parse_spread(spread_text);

  inclab::IncoherenceReport report;
  if (condition == "mri") {
    report = inclab::mri_check(sigma, support, spread, delta / rho);
  } else if (condition == "mri-orthonormal") {
    report = inclab::mri_check_orthonormal(sigma, support, spread, delta / rho);
  } else if (condition == "lai" || condition == "pwi" || condition.rfind("rip:", 0) == 0) {
    double value = 0.0;
    double threshold = 0.0;
    if (condition == "lai") {
      value = inclab::lasso_incoherence(sigma, support);
      threshold = 1.0 - delta;
    } else if (condition == "pwi") {
      value = inclab::pairwise_incoherence(sigma);
      threshold = 1.0 / (3.0 * support.size());
    } else {
      const int order = std::stoi(condition.substr(4));
      value = inclab::rip_constant(sigma, order);
      threshold = 1.0 / 3.0;
    }
    report.condition_name = condition;
    report.slack_param = delta;
    inclab::MarginRow row;
    row.lhs = value;
    row.rhs = threshold;
    row.slack = threshold - value;
    report.margins.push_back(row);
    report.binding = row;
    report.holds = value <= threshold;
  } else {
    throw inclab::ParseError("unknown condition '" + condition + "'");
  }

  std::cout << inclab::to_json(report).dump(2) << "\n";
  scope.manifest["holds"] = report.holds;
  return report.holds ? 0 : 1;
}

int main_impl(int argc, char** argv) {
  CLI::App app{"Support-recovery condition lab for marginal regression and related selectors"};
  app.require_subcommand(1);

  // check
  auto* check = app.add_subcommand("check", "Evaluate an incoherence condition on a matrix");
  std::string matrix_path, support_spec, condition = "mri", spread_text = "1";
  std::string manifest_path;
  double rho = 1.0, delta = 0.0;
  check->add_option("--matrix", matrix_path, "covariance CSV (no header)")->required();
  check->add_option("--support", support_spec, "support: comma list or a..b range")->required();
  check->add_option("--rho", rho, "minimum signal strength");
  check->add_option("--spread", spread_text, "coefficient spread R, or 'inf'");
  check->add_option("--delta", delta, "slack delta");
  check->add_option("--condition", condition, "mri | mri-orthonormal | lai | pwi | rip:K");
  check->add_option("--manifest", manifest_path, "manifest path");

  // region
  auto* region = app.add_subcommand("region", "Sweep the (mu, eta) example regions");
  int region_r = 2, region_grid = 50;
  std::string region_spread = "1", region_out = "region.csv";
  region->add_option("--r", region_r, "block size r");
  region->add_option("--R", region_spread, "coefficient spread R, or 'inf'");
  region->add_option("--grid", region_grid, "cells per axis");
  region->add_option("--out", region_out, "output CSV")->required();
  region->add_option("--manifest", manifest_path, "manifest path");

  // verify
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  std::string suite = "theorem1";
  int instances = 200;
  std::uint64_t seed = 7;
  verify->add_option("--suite", suite, "theorem1 | lemmas | props | conjecture1");
  verify->add_option("--instances", instances, "instance count");
  verify->add_option("--seed", seed, "master seed");
  verify->add_option("--manifest", manifest_path, "manifest path");

  // sample
  auto* sample = app.add_subcommand("sample", "Phase-transition sweep for sample MR");
  int sample_p = 200, sample_s = 5, replicates = 500;
  double noise = 1.0, sample_rho = 1.0, sample_delta = 0.1;
  std::string n_grid_text = "250,500,1000", family_text = "identity",
              sample_spread = "1", sample_out = "sweep.csv";
  std::uint64_t sample_seed = 1;
  sample->add_option("--p", sample_p, "dimension");
  sample->add_option("--s", sample_s, "support size");
  sample->add_option("--n-grid", n_grid_text, "comma-separated sample sizes");
  sample->add_option("--sigma", noise, "noise standard deviation");
  sample->add_option("--rho", sample_rho, "minimum signal strength");
  sample->add_option("--R", sample_spread, "coefficient spread R");
  sample->add_option("--replicates", replicates, "replicates per cell");
  sample->add_option("--seed", sample_seed, "master seed");
  sample->add_option("--delta", sample_delta, "class slack delta (incoherence precondition)");
  sample->add_option("--family", family_text, "identity | block:MU,ETA,R");
  sample->add_option("--out", sample_out, "output CSV")->required();
  sample->add_option("--manifest", manifest_path, "manifest path");

  CLI11_PARSE(app, argc, argv);

  if (check->parsed()) {
    ManifestScope scope("check",
                        manifest_path.empty() ? "inclab_check.manifest.json" : manifest_path);
    scope.set_param("matrix", matrix_path);
    scope.set_param("support", support_spec);
    scope.set_param("rho", rho);
    scope.set_param("spread", spread_text);
    scope.set_param("delta", delta);
    scope.set_param("condition", condition);
    try {
      const int code = run_check(matrix_path, support_spec, rho, spread_text, delta,
                                 condition, scope);
      scope.finish();
      return code;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      scope.finish(e.what());
      return 2;
    }
  }

  if (region->parsed()) {
    ManifestScope scope("region",
                        manifest_path.empty() ? region_out + ".manifest.json" : manifest_path);
    scope.set_param("r", region_r);
    scope.set_param("R", region_spread);
    scope.set_param("grid", region_grid);
    scope.set_param("out", region_out);
    try {
      const auto rows = inclab::region_sweep(region_r, parse_spread(region_spread), region_grid);
      write_text_atomic(region_out, inclab::region_csv(rows));
      scope.add_output(region_out);
      scope.finish();
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      scope.finish(e.what());
      return 2;
    }
  }

  if (verify->parsed()) {
    ManifestScope scope("verify",
                        manifest_path.empty() ? "inclab_verify.manifest.json" : manifest_path);
    scope.set_param("suite", suite);
    scope.set_param("instances", instances);
    scope.set_param("seed", seed);
    scope.manifest["seed"] = seed;
    try {
      inclab::SuiteResult result;
      if (suite == "theorem1") {
        result = inclab::run_theorem1_suite(instances, seed);
      } else if (suite == "lemmas") {
        result = inclab::run_lemma_suite(seed);
      } else if (suite == "props") {
        result = inclab::run_prop_suite(instances, seed);
      } else if (suite == "conjecture1") {
        result = inclab::run_conjecture1_suite(instances, seed);
      } else {
        throw inclab::ParseError("unknown suite '" + suite + "'");
      }
      std::cout << inclab::to_json(result).dump(2) << "\n";
      scope.manifest["violations"] = result.violations;
      scope.manifest["findings"] = result.findings;
      scope.finish();
      return result.ok() ? 0 : 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      scope.finish(e.what());
      return 2;
    }
  }

  if (sample->parsed()) {
    ManifestScope scope("sample",
                        manifest_path.empty() ? sample_out + ".manifest.json" : manifest_path);
    scope.set_param("p", sample_p);
    scope.set_param("s", sample_s);
    scope.set_param("n_grid", n_grid_text);
    scope.set_param("sigma", noise);
    scope.set_param("rho", sample_rho);
    scope.set_param("R", sample_spread);
    scope.set_param("replicates", replicates);
    scope.set_param("delta", sample_delta);
    scope.set_param("family", family_text);
    scope.set_param("out", sample_out);
    scope.manifest["seed"] = sample_seed;
    try {
      inclab::GaussianFamily family;
      family.p = sample_p;
      family.rho = sample_rho;
      family.spread = parse_spread(sample_spread);
      family.slack = sample_delta;
      if (family_text == "identity") {
        family.name = "identity";
      } else if (family_text.rfind("block:", 0) == 0) {
        const auto parts = family_text.substr(6);
        const auto first = parts.find(',');
        const auto second = parts.find(',', first + 1);
        if (first == std::string::npos || second == std::string::npos) {
          throw inclab::ParseError("block family expects block:MU,ETA,R");
        }
        family.name = "block";
        family.mu = std::stod(parts.substr(0, first));
        family.eta = std::stod(parts.substr(first + 1, second - first - 1));
        family.r = std::stoi(parts.substr(second + 1));
      } else {
        throw inclab::ParseError("unknown family '" + family_text + "'");
      }
      inclab::SampleConfig config;
      config.sigma_noise = noise;
      config.seed = sample_seed;
      config.replicates = replicates;
      const auto cells = inclab::phase_transition_sweep(family, {sample_s},
                                                        parse_int_list(n_grid_text), config);
      write_text_atomic(sample_out, inclab::phase_table_csv(cells));
      scope.add_output(sample_out);
      scope.finish();
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      scope.finish(e.what());
      return 2;
    }
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return main_impl(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
