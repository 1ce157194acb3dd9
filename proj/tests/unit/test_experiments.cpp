#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "idlab/errors.hpp"
#include "idlab/experiments.hpp"

#ifndef IDLAB_SCHEMA_FILE
#error "IDLAB_SCHEMA_FILE must point at schema/config.schema.json"
#endif

using namespace idlab;

TEST_CASE("registry has twelve uniquely named experiments with anchors") {
  const auto& reg = experiment_registry();
  CHECK(reg.size() == 12);
  std::set<std::string> names;
  for (const auto& e : reg) {
    names.insert(e.name);
    CHECK_FALSE(e.anchor.empty());
    CHECK(e.default_params.contains("seeds"));
    CHECK(e.csv_columns.front() == "seed");
    CHECK(e.csv_columns.back() == "pass");
    CHECK(find_experiment(e.name) == &e);
  }
  CHECK(names.size() == 12);
  CHECK(find_experiment("nope") == nullptr);
}

TEST_CASE("config parsing applies defaults and rejects bad input") {
  const ExperimentConfig c = parse_config(Json{{"experiment", "fa-rotation"}, {"seed", 3}, {"params", {{"obs_dim", 4}}}});
  CHECK(c.seed == 3);
  CHECK(c.params["obs_dim"] == 4);
  CHECK(c.params["tol"] == 1e-12);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "bogus"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"seed", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "fa-rotation"}, {"params", {{"unknown", 1}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "fa-rotation"}, {"params", {{"obs_dim", 2.5}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "fa-rotation"}, {"params", {{"tol", "small"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "fa-rotation"}, {"seed", -1}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "fa-rotation"}, {"extra", true}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "fa-rotation"}, {"params", {{"seeds", 0}}}}), ConfigError);
  // integer values are accepted where the default is a float
  CHECK_NOTHROW(parse_config(Json{{"experiment", "fa-rotation"}, {"params", {{"tol", 1}}}}));
}

TEST_CASE("bad values inside parameters surface as config errors") {
  ExperimentConfig c = parse_config(Json{{"experiment", "fa-rotation"}, {"params", {{"mu1", {"a", 0}}}}});
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c = parse_config(Json{{"experiment", "kr-identity"}, {"params", {{"priors", {"cauchy"}}}}});
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c = parse_config(Json{{"experiment", "kr-identity"}, {"params", {{"dims", {0}}}}});
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
}

TEST_CASE("runs are deterministic and parallel seeds match serial seeds") {
  const ExperimentConfig c =
      parse_config(Json{{"experiment", "kr-gaussian"}, {"seed", 5}, {"params", {{"seeds", 3}, {"trials", 2}}}});
  const ExperimentOutcome a = run_experiment(c, 1);
  const ExperimentOutcome b = run_experiment(c, 3);
  CHECK(strip_timestamp(a.results).dump() == strip_timestamp(b.results).dump());
  CHECK(a.rows == b.rows);
  CHECK(a.results["per_seed"][2]["seed"] == 7);
  CHECK(a.results.contains("generated_at"));
  CHECK_FALSE(strip_timestamp(a.results).contains("generated_at"));
}

TEST_CASE("failed claims are reported, not thrown") {
  const ExperimentConfig c = parse_config(
      Json{{"experiment", "fa-rotation"}, {"params", {{"min_distance", 100.0}}}});
  const ExperimentOutcome o = run_experiment(c);
  CHECK_FALSE(o.pass);
  CHECK(o.results["report"]["loading_distance"].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("outputs are written with fixed csv columns") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "idlab_unit_outputs";
  fs::remove_all(dir);
  ExperimentConfig c = parse_config(Json{{"experiment", "fa-three-env"}, {"out_dir", dir.string()}});
  write_outcome(c, run_experiment(c));
  CHECK(fs::exists(dir / "results.json"));
  CHECK(fs::exists(dir / "config.echo.json"));
  std::ifstream csv(dir / "tables" / "fa-three-env.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "seed,n_envs,contrast_rank,unique,recovered_distance,pass");
  std::ifstream echo(dir / "config.echo.json");
  const Json e = Json::parse(echo);
  CHECK(e["params"]["obs_dim"] == 5);
  fs::remove_all(dir);
}

TEST_CASE("csv cells") {
  CHECK(format_csv_cell(Json(true)) == "true");
  CHECK(format_csv_cell(Json(nullptr)).empty());
  CHECK(format_csv_cell(Json(3)) == "3");
  CHECK(format_csv_cell(Json(0.1)) == "0.10000000000000001");
  CHECK(format_csv_cell(Json("x")) == "x");
}

TEST_CASE("published schema matches the registry") {
  std::ifstream in(IDLAB_SCHEMA_FILE);
  REQUIRE(in.good());
  const Json published = Json::parse(in);
  CHECK(published == config_schema());
}
