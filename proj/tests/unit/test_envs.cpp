#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "../oracles/oracle_values.hpp"
#include "helpers.hpp"
#include "idlab/envs.hpp"
#include "idlab/errors.hpp"

using namespace idlab;

namespace {

std::vector<VectorXd> triangle() {
  return {(VectorXd(2) << 0.0, 0.0).finished(), (VectorXd(2) << 1.0, 0.0).finished(),
          (VectorXd(2) << 0.0, 1.0).finished()};
}

// custom exponential family: log base measure and statistic supplied by the test
std::shared_ptr<ExpFamily::Structure> custom_structure(std::string id, ExpFamily::ScalarFn log_m,
                                                       ExpFamily::StatFn t) {
  auto s = std::make_shared<ExpFamily::Structure>();
  s->family_id = std::move(id);
  s->dim = 2;
  s->stat_dim = 2;
  s->log_base_measure = std::move(log_m);
  s->suff_stat = std::move(t);
  s->log_partition = [](const VectorXd&) { return 0.0; };
  return s;
}

EnvironmentSet custom_envs(const std::shared_ptr<ExpFamily::Structure>& s) {
  std::vector<std::shared_ptr<const ExpFamily>> priors;
  for (const auto& eta : triangle()) priors.push_back(std::make_shared<ExpFamily>(s, eta));
  return EnvironmentSet::from_expfam({"a", "b", "c"}, priors);
}

}  // namespace

TEST_CASE("environment set construction") {
  const EnvironmentSet envs = EnvironmentSet::gaussian_means(triangle());
  CHECK(envs.size() == 3);
  CHECK(envs.labels()[2] == "e2");
  CHECK(envs.has_shared_stat());
  CHECK((envs.eta_matrix().row(1).transpose() - triangle()[1]).norm() == 0.0);
  CHECK(envs.prior("e1")->dim() == 2);
  CHECK_THROWS_AS(envs.prior("missing"), std::out_of_range);
  CHECK_THROWS_AS(EnvironmentSet({"a", "a"}, {GaussianDistribution::standard(2), GaussianDistribution::standard(2)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(EnvironmentSet({"a", "b"}, {GaussianDistribution::standard(2), GaussianDistribution::standard(3)}),
                  DimensionMismatch);
  CHECK_THROWS_AS(EnvironmentSet::from_expfam({"a", "b"}, {ExpFamily::gaussian_mean(VectorXd::Zero(2)),
                                                           ExpFamily::quartic_mean(VectorXd::Zero(2))}),
                  MismatchedFamily);
}

TEST_CASE("spanning check") {
  CHECK(spanning_check(triangle()).spans);
  const SpanReport two = spanning_check({triangle()[0], triangle()[1]});
  CHECK_FALSE(two.spans);
  CHECK(two.contrast_rank == 1);
  // raw rank can be full while the contrasts are not
  const SpanReport shifted = spanning_check({(VectorXd(2) << 1.0, 0.0).finished(), (VectorXd(2) << 0.0, 1.0).finished()});
  CHECK(shifted.raw_rank == 2);
  CHECK(shifted.contrast_rank == 1);
  CHECK_FALSE(shifted.spans);
}

TEST_CASE("strong identifiability preconditions name the failing clause") {
  CHECK(validate_strong_vae_config(EnvironmentSet::gaussian_means(triangle())).pass);
  const ValidationReport span = validate_strong_vae_config(EnvironmentSet::gaussian_means({triangle()[0], triangle()[1]}));
  CHECK(span.failing_clause == "spanning");
  const auto half = custom_structure(
      "half_plane", [](const VectorXd& z) { return z(0) < 0.0 ? -INFINITY : -0.5 * z.squaredNorm(); },
      [](const VectorXd& z) -> VectorXd { return z; });
  CHECK(validate_strong_vae_config(custom_envs(half)).failing_clause == "base_measure");
  const auto square = custom_structure(
      "squares", [](const VectorXd& z) { return -z.squaredNorm(); },
      [](const VectorXd& z) -> VectorXd { return z.array().square(); });
  const ValidationReport inj = validate_strong_vae_config(custom_envs(square));
  CHECK(inj.failing_clause == "injectivity");
  CHECK_FALSE(inj.injective_coordinate_monotone);
}

TEST_CASE("environment data generation and CSV round trip") {
  const EnvironmentSet envs = EnvironmentSet::gaussian_means(triangle());
  const Generator g = Generator::from_linear(LinearGenerator(MatrixXd::Identity(3, 2)));
  RngStream rng(30, 0);
  const Dataset d = generate_environment_data(envs, g, 0.1, 50, rng);
  CHECK(d.size() == 150);
  CHECK(d.x_of(1).rows() == 50);
  CHECK(((d.x.leftCols(2) - d.z).array().abs() < 1.0).all());
  RngStream again(30, 0);
  const Dataset d2 = generate_environment_data(envs, g, 0.1, 50, again);
  CHECK((d2.x - d.x).norm() == 0.0);

  const auto path = std::filesystem::temp_directory_path() / "idlab_envs_roundtrip.csv";
  d.write_csv(path.string());
  const Dataset back = Dataset::read_csv(path.string());
  CHECK((back.x - d.x).norm() == 0.0);
  CHECK((back.z - d.z).norm() == 0.0);
  CHECK(back.env == d.env);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(Dataset::read_csv("/nonexistent/file.csv"), ConfigError);
}

TEST_CASE("affine relation fit matches least squares") {
  const MatrixXd ta = testgen::rowmajor(oracle::kRelTa, 8, 2), tb = testgen::rowmajor(oracle::kRelTb, 8, 2);
  const AffineRelation rel = affine_relation_fit(ta, tb);
  CHECK((rel.L - testgen::rowmajor(oracle::kRelL, 2, 2)).norm() < 1e-12);
  CHECK((rel.d - testgen::vec(oracle::kRelD)).norm() < 1e-12);
  CHECK(rel.residual == doctest::Approx(oracle::kRelResidual[0]).epsilon(1e-10));
  CHECK_THROWS_AS(affine_relation_fit(ta.topRows(2), tb.topRows(2)), RankDeficient);
  CHECK_THROWS_AS(affine_relation_fit(MatrixXd::Ones(8, 2), tb), RankDeficient);
}

TEST_CASE("exact affine relations have zero residual (property)") {
  RngStream rng(31, 0);
  for (int t = 0; t < 30; ++t) {
    const auto k = testgen::dim_in(rng, 1, 4);
    const MatrixXd ta = testgen::normal_matrix(40, k, rng);
    const MatrixXd l = testgen::well_conditioned(k, rng);
    const VectorXd d = testgen::normal_vector(k, rng);
    const AffineRelation rel = affine_relation_fit(ta, (ta * l).rowwise() + d.transpose());
    CHECK(rel.residual < 1e-10);
    CHECK((rel.L - l).norm() < 1e-9);
  }
}

TEST_CASE("multi-environment affine fit matches least squares") {
  std::vector<VectorXd> etas, xs;
  const MatrixXd e = testgen::rowmajor(oracle::kMeEtas, 4, 2), x = testgen::rowmajor(oracle::kMeX, 4, 3);
  for (int i = 0; i < 4; ++i) {
    etas.push_back(e.row(i).transpose());
    xs.push_back(x.row(i).transpose());
  }
  const LinearGenerator g = fit_multi_env_affine(xs, etas);
  CHECK((g.loading() - testgen::rowmajor(oracle::kMeLoading, 3, 2)).norm() < 1e-12);
  CHECK((g.offset() - testgen::vec(oracle::kMeOffset)).norm() < 1e-12);
  CHECK_THROWS_AS(fit_multi_env_affine({xs[0], xs[1]}, {etas[0], etas[1]}), RankDeficient);
}

TEST_CASE("gaussian KR fits from samples") {
  RngStream rng(32, 0);
  const MatrixXd cov = testgen::spd(2, rng);
  const GaussianDistribution data_law(testgen::normal_vector(2, rng), cov);
  const auto target = GaussianDistribution::standard(2);
  const MatrixXd x = data_law.sample(rng, 50000);
  const TriangularMap fit = fit_gaussian_kr(x, *target);
  const TriangularMap exact = fit_gaussian_kr_moments(data_law.mean(), cov, *target);
  const VectorXd z = testgen::normal_vector(2, rng);
  CHECK((fit.forward(z) - exact.forward(z)).norm() < 0.05);
  CHECK_THROWS_AS(fit_gaussian_kr(x.topRows(5), *target), std::invalid_argument);
}

TEST_CASE("marginal quantile transport maps marginals onto the target") {
  RngStream rng(33, 0);
  const ProductDistribution target({std::make_shared<LaplaceDistribution>(0.0, 1.0),
                                    std::make_shared<LogisticDistribution>(0.0, 1.0)});
  const MatrixXd x = GaussianDistribution::standard(2)->sample(rng, 20000);
  const TriangularMap m = fit_marginal_quantile_transport(x, target, 200);
  CHECK(check_monotone(m, rng, 200));
  const MatrixXd y = m.forward_rows(x.topRows(5000));
  CHECK(target.marginals()[0]->conditional_cdf(0, VectorXd(0), y.col(0).mean()) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("learned-prior fits are affine gauges of each other") {
  const EnvironmentSet envs = EnvironmentSet::gaussian_means(
      {(VectorXd(2) << 3.0, 0.0).finished(), (VectorXd(2) << -1.5, 2.6).finished(), (VectorXd(2) << -1.5, -2.6).finished()});
  MatrixXd f(2, 2);
  f << 1.0, 0.3, -0.4, 0.8;
  const Generator truth = Generator::from_linear(LinearGenerator(f));
  RngStream rng(34, 0);
  const Dataset d = generate_environment_data(envs, truth, 0.0, 5000, rng);
  const LearnedPriorFit a = fit_learned_prior_linear(d, Whitening::Cholesky);
  const LearnedPriorFit b = fit_learned_prior_linear(d, Whitening::Symmetric);
  CHECK(a.latent_means.size() == 3);
  const MatrixXd x = d.x.topRows(500);
  const AffineRelation rel = affine_relation_fit(Generator::from_linear(a.generator).inverse_rows(x),
                                                 Generator::from_linear(b.generator).inverse_rows(x));
  CHECK(rel.residual < 1e-10);
  CHECK(rel.condition < 10.0);
}
