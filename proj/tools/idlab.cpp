// idlab: run registered identifiability experiments from JSON configs.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "idlab/errors.hpp"
#include "idlab/experiments.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitClaimFailure = 1;
constexpr int kExitConfig = 2;

std::size_t resolve_jobs(std::size_t flag) {
  if (const char* env = std::getenv("IDLAB_JOBS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw idlab::ConfigError(std::string("IDLAB_JOBS must be a positive integer, got '") + env + "'");
  }
  return flag == 0 ? 1 : flag;
}

int cmd_run(const std::string& path, const std::optional<std::uint64_t>& seed,
            const std::optional<std::string>& out, std::size_t jobs_flag) {
  idlab::ExperimentConfig cfg;
  std::size_t jobs = 1;
  try {
    std::ifstream in(path);
    if (!in) throw idlab::ConfigError("cannot open config file " + path);
    idlab::Json doc;
    try {
      doc = idlab::Json::parse(in);
    } catch (const idlab::Json::exception& e) {
      throw idlab::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (seed) doc["seed"] = *seed;
    if (out) doc["out_dir"] = *out;
    cfg = idlab::parse_config(doc);
    if (cfg.out_dir.empty()) cfg.out_dir = "results/" + cfg.experiment;
    jobs = resolve_jobs(jobs_flag);
  } catch (const idlab::ConfigError& e) {
    std::cerr << "idlab: config error: " << e.what() << "\n";
    return kExitConfig;
  }

  idlab::ExperimentOutcome outcome;
  try {
    outcome = idlab::run_experiment(cfg, jobs);
  } catch (const idlab::ConfigError& e) {
    std::cerr << "idlab: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "idlab: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "idlab: " << cfg.experiment << " failed: " << e.what() << "\n";
    return kExitClaimFailure;
  }
  try {
    idlab::write_outcome(cfg, outcome);
  } catch (const std::exception& e) {
    std::cerr << "idlab: cannot write outputs: " << e.what() << "\n";
    return kExitClaimFailure;
  }
  for (const auto& c : outcome.results.at("claims"))
    std::cout << (c.at("pass").get<bool>() ? "PASS " : "FAIL ") << c.at("name").get<std::string>()
              << "\n";
  std::cout << cfg.experiment << ": " << (outcome.pass ? "pass" : "FAIL") << " -> " << cfg.out_dir << "\n";
  return outcome.pass ? kExitPass : kExitClaimFailure;
}

int cmd_list(bool as_json) {
  const auto& reg = idlab::experiment_registry();
  if (as_json) {
    idlab::Json arr = idlab::Json::array();
    for (const auto& e : reg)
      arr.push_back({{"name", e.name}, {"anchor", e.anchor}, {"default_runtime_s", e.default_runtime_s}});
    std::cout << arr.dump(2) << "\n";
    return kExitPass;
  }
  for (const auto& e : reg) std::printf("%-14s %6.1fs  %s\n", e.name.c_str(), e.default_runtime_s, e.anchor.c_str());
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"idlab: identifiability experiment runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment config");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::size_t jobs = 1;
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out, "output directory");
  run->add_option("--jobs", jobs, "worker threads over seeds (IDLAB_JOBS overrides)");

  auto* list = app.add_subcommand("list", "list registered experiments");
  bool as_json = false;
  list->add_flag("--json", as_json, "print a JSON array");

  app.add_subcommand("schema", "print the config JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  if (run->parsed()) return cmd_run(config_path, seed, out, jobs);
  if (list->parsed()) return cmd_list(as_json);
  std::cout << idlab::config_schema().dump(2) << "\n";
  return kExitPass;
}
