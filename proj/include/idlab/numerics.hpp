#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace idlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Relative singular-value threshold used for every rank and pseudoinverse
/// decision in the library.
inline constexpr double kRankRelTol = 1e-8;

namespace num {

double normal_cdf(double x);
double normal_log_pdf(double x);
double normal_quantile(double p);

/// Rank of `a` counting singular values above rel_tol * sigma_max.
std::size_t rank(const MatrixXd& a, double rel_tol = kRankRelTol);
/// SVD pseudoinverse truncated at rel_tol * sigma_max.
MatrixXd pinv(const MatrixXd& a, double rel_tol = kRankRelTol);
/// sigma_max / sigma_min; +inf for a rank-deficient matrix.
double condition_number(const MatrixXd& a);
/// Orthogonal projector onto the row space of `a`.
MatrixXd row_space_projector(const MatrixXd& a, double rel_tol = kRankRelTol);

/// Adaptive Gauss-Kronrod quadrature on [a, b]; either bound may be infinite.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

struct RootOptions {
  double tol = 1e-10;          // on the function value scale
  int max_iter = 200;          // refinement cap
  int max_expansions = 200;    // bracket growth cap
};

/// Solves cdf(x) = level for a non-decreasing `cdf`, starting from a bracket
/// around `guess` with half-width `scale`. Bisection with secant refinement.
/// Throws BracketFailure when the bracket cannot be grown to contain `level`.
double solve_increasing(const std::function<double(double)>& cdf, double level, double guess,
                        double scale, const RootOptions& opts = {});

/// Whether every entry of `a` above the diagonal is exactly zero.
bool is_lower_triangular(const MatrixXd& a);

/// Kolmogorov-Smirnov distance between the empirical law of `u` and U(0, 1).
double ks_uniform_statistic(std::vector<double> u);
/// Survival function of the limiting Kolmogorov distribution.
double kolmogorov_sf(double lambda);
/// p-value of a one-sample KS statistic `d` at sample size n (Stephens' correction).
double ks_pvalue(double d, std::size_t n);
/// Smallest d with ks_pvalue(d, n) <= alpha.
double ks_critical_value(std::size_t n, double alpha);

}  // namespace num
}  // namespace idlab
