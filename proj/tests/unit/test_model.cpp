#include <doctest.h>

#include "helpers.hpp"
#include "idlab/errors.hpp"
#include "idlab/model.hpp"

using namespace idlab;

TEST_CASE("generator factories round trip") {
  RngStream rng(60, 0);
  const MatrixXd z = testgen::normal_matrix(50, 2, rng);
  const Generator lin = Generator::from_linear(LinearGenerator(testgen::normal_matrix(4, 2, rng) + MatrixXd::Identity(4, 2)));
  const Generator tri = Generator::from_triangular(explicit_map_by_name("sinh_shear", 2));
  const Generator emb = Generator::coordinate_embedding(2, 5);
  CHECK(lin.round_trip_error(z) < 1e-10);
  CHECK(tri.round_trip_error(z) < 1e-10);
  CHECK(emb.round_trip_error(z) == 0.0);
  CHECK(lin.linear().has_value());
  CHECK(tri.triangular().has_value());
  CHECK_FALSE(tri.linear().has_value());
  CHECK(emb.forward(z.row(0).transpose()).tail(3).norm() == 0.0);
  const Generator affine_tri = Generator::from_triangular(TriangularMap::affine(testgen::lower_positive(2, rng), VectorXd::Zero(2)));
  CHECK(affine_tri.linear().has_value());
  CHECK_THROWS_AS(Generator::coordinate_embedding(3, 2), std::invalid_argument);
  CHECK_THROWS_AS(lin.forward(VectorXd::Zero(3)), DimensionMismatch);
}

TEST_CASE("precomposition with an automorphism") {
  RngStream rng(61, 0);
  const Generator lin = Generator::from_linear(LinearGenerator(testgen::well_conditioned(2, rng)));
  const Automorphism a = Automorphism::affine(testgen::well_conditioned(2, rng), testgen::normal_vector(2, rng));
  const Generator moved = lin.after(a);
  CHECK(moved.linear().has_value());
  const Automorphism bend = explicit_map_by_name("cubic_shear", 2).as_automorphism();
  const Generator nonlin = lin.after(bend);
  CHECK_FALSE(nonlin.linear().has_value());
  for (int i = 0; i < 20; ++i) {
    const VectorXd z = testgen::normal_vector(2, rng);
    CHECK((moved.forward(z) - lin.forward(a.forward(z))).norm() < 1e-10);
    CHECK((nonlin.inverse(nonlin.forward(z)) - z).norm() < 1e-8);
  }
}

TEST_CASE("model parameter validation") {
  RngStream rng(62, 0);
  const ModelParams good{Generator::coordinate_embedding(2, 3), GaussianDistribution::standard(2)};
  CHECK(good.validate(rng));
  const ModelParams bad{Generator::coordinate_embedding(2, 3), GaussianDistribution::standard(3)};
  CHECK_THROWS_AS(bad.validate(rng), std::invalid_argument);
  const Generator broken(1, 1, [](const VectorXd& z) -> VectorXd { return z; },
                         [](const VectorXd& x) -> VectorXd { return 2.0 * x; });
  CHECK_FALSE((ModelParams{broken, GaussianDistribution::standard(1)}).validate(rng));
}
