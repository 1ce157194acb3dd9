#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace idlab {

using Json = nlohmann::json;

struct Claim {
  std::string name;
  bool pass = false;
  Json value;
  Json threshold;
  Json to_json() const;
};

/// Output of one seed of one experiment.
struct SeedResult {
  std::uint64_t seed = 0;
  Json report;
  std::vector<std::vector<Json>> rows;  // one per table row, in csv column order
  std::vector<Claim> claims;
};

struct ExperimentInfo {
  std::string name;
  std::string anchor;
  double default_runtime_s = 0.0;
  Json default_params;  // always contains "seeds"
  std::vector<std::string> csv_columns;
  std::function<SeedResult(const Json& params, std::uint64_t seed)> run_seed;
  /// Combines per-seed claims; when empty every claim of every seed must hold.
  std::function<std::vector<Claim>(const Json& params, const std::vector<SeedResult>&)> aggregate;
};

/// Stable registry order.
const std::vector<ExperimentInfo>& experiment_registry();
/// nullptr for unknown names.
const ExperimentInfo* find_experiment(const std::string& name);

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  Json params;  // effective: defaults overlaid with the user's values
  std::string out_dir;
};

/// Validates a config document and fills in defaults; throws ConfigError.
ExperimentConfig parse_config(const Json& doc);

struct ExperimentOutcome {
  bool pass = false;
  Json results;  // results.json content, "generated_at" included
  Json config_echo;
  std::vector<std::string> csv_columns;
  std::vector<std::vector<Json>> rows;
};

/// Runs every seed (seed, seed + 1, ...) on a pool of `jobs` threads.
ExperimentOutcome run_experiment(const ExperimentConfig& config, std::size_t jobs = 1);

/// Writes results.json, config.echo.json and tables/<name>.csv under
/// config.out_dir, each through a temporary file and a rename.
void write_outcome(const ExperimentConfig& config, const ExperimentOutcome& outcome);

/// JSON schema of config files, including each experiment's parameters and
/// csv columns.
Json config_schema();

/// results.json without its timestamp, for determinism comparisons.
Json strip_timestamp(Json results);

std::string format_csv_cell(const Json& v);

}  // namespace idlab
