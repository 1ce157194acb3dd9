#include <doctest.h>

#include <cmath>

#include "../oracles/oracle_values.hpp"
#include "helpers.hpp"
#include "idlab/errors.hpp"
#include "idlab/numerics.hpp"

using namespace idlab;

TEST_CASE("normal cdf and quantile match reference values") {
  for (std::size_t i = 0; i < std::size(oracle::kNormalX); ++i)
    CHECK(num::normal_cdf(oracle::kNormalX[i]) ==
          doctest::Approx(oracle::kNormalCdf[i]).epsilon(1e-13));
  for (std::size_t i = 0; i < std::size(oracle::kNormalP); ++i)
    CHECK(num::normal_quantile(oracle::kNormalP[i]) ==
          doctest::Approx(oracle::kNormalQuantile[i]).epsilon(1e-12));
}

TEST_CASE("normal quantile inverts the cdf") {
  RngStream rng(1, 0);
  for (int t = 0; t < 500; ++t) {
    // lower tail only: cdf(x) near 1 has lost the digits that the quantile would need
    const double x = -6.0 * rng.uniform();
    CHECK(num::normal_quantile(num::normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
  }
}

TEST_CASE("kolmogorov survival function on both series branches") {
  for (std::size_t i = 0; i < std::size(oracle::kKolmogorovLambda); ++i)
    CHECK(num::kolmogorov_sf(oracle::kKolmogorovLambda[i]) ==
          doctest::Approx(oracle::kKolmogorovSf[i]).epsilon(1e-11));
  CHECK(num::kolmogorov_sf(0.0) == 1.0);
}

TEST_CASE("KS p-values and critical values") {
  for (std::size_t i = 0; i < std::size(oracle::kKsD); ++i)
    CHECK(num::ks_pvalue(oracle::kKsD[i], static_cast<std::size_t>(oracle::kKsN[i])) ==
          doctest::Approx(oracle::kKsP[i]).epsilon(1e-10));
  for (std::size_t i = 0; i < std::size(oracle::kCritN); ++i)
    CHECK(num::ks_critical_value(static_cast<std::size_t>(oracle::kCritN[i]), oracle::kCritAlpha[i]) ==
          doctest::Approx(oracle::kCrit[i]).epsilon(1e-9));
}

TEST_CASE("KS statistic of a fixed sample") {
  std::vector<double> u(std::begin(oracle::kKsSample), std::end(oracle::kKsSample));
  CHECK(num::ks_uniform_statistic(u) == doctest::Approx(oracle::kKsSampleStat[0]).epsilon(1e-15));
}

TEST_CASE("rank, pseudoinverse and projector properties") {
  RngStream rng(2, 0);
  for (int t = 0; t < 50; ++t) {
    const auto r = testgen::dim_in(rng, 1, 5), c = testgen::dim_in(rng, 1, 5);
    const auto k = testgen::dim_in(rng, 1, std::min(r, c));
    const MatrixXd a = testgen::normal_matrix(r, k, rng) * testgen::normal_matrix(k, c, rng);
    CHECK(num::rank(a) == static_cast<std::size_t>(k));
    const MatrixXd p = num::pinv(a);
    CHECK((a * p * a - a).norm() < 1e-9 * std::max(1.0, a.norm()));
    CHECK((p * a * p - p).norm() < 1e-9 * std::max(1.0, p.norm()));
    const MatrixXd proj = num::row_space_projector(a);
    CHECK((proj * proj - proj).norm() < 1e-10);
    CHECK((a * proj - a).norm() < 1e-9 * std::max(1.0, a.norm()));
  }
  CHECK(std::isinf(num::condition_number(MatrixXd::Zero(2, 2))));
  CHECK(num::condition_number(MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
}

TEST_CASE("quadrature on finite and infinite ranges") {
  CHECK(num::integrate([](double x) { return std::exp(-0.5 * x * x); }, -INFINITY, INFINITY) ==
        doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-12));
  CHECK(num::integrate([](double x) { return x * x; }, 0.0, 3.0) == doctest::Approx(9.0).epsilon(1e-13));
}

TEST_CASE("increasing solver finds roots and reports bracket failure") {
  const auto cdf = [](double x) { return num::normal_cdf(x); };
  CHECK(num::solve_increasing(cdf, 0.975, 100.0, 1.0) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK_THROWS_AS(num::solve_increasing([](double) { return 0.2; }, 0.7, 0.0, 1.0), BracketFailure);
}

TEST_CASE("lower-triangular test is exact") {
  MatrixXd a = MatrixXd::Identity(3, 3);
  a(2, 0) = 4.0;
  CHECK(num::is_lower_triangular(a));
  a(0, 2) = 1e-300;
  CHECK_FALSE(num::is_lower_triangular(a));
}
