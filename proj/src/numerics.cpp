#include "idlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "idlab/errors.hpp"

namespace idlab::num {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_log_pdf(double x) {
  return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

std::size_t rank(const MatrixXd& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

MatrixXd pinv(const MatrixXd& a, double rel_tol) {
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  VectorXd inv = VectorXd::Zero(s.size());
  if (s.size() > 0 && s(0) > 0.0) {
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > rel_tol * s(0)) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

double condition_number(const MatrixXd& a) {
  Eigen::JacobiSVD<MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

MatrixXd row_space_projector(const MatrixXd& a, double rel_tol) {
  const Eigen::Index k = a.cols();
  if (a.rows() == 0) return MatrixXd::Zero(k, k);
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  if (s.size() > 0 && s(0) > 0.0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > rel_tol * s(0)) ++r;
  const MatrixXd v = svd.matrixV().leftCols(r);
  return v * v.transpose();
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, rel_tol, &err);
}

double solve_increasing(const std::function<double(double)>& cdf, double level, double guess,
                        double scale, const RootOptions& opts) {
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  double lo = guess - scale;
  double hi = guess + scale;
  double flo = cdf(lo);
  double fhi = cdf(hi);
  int expansions = 0;
  double width = scale;
  while (flo > level) {
    if (++expansions > opts.max_expansions || !std::isfinite(lo))
      throw BracketFailure("lower end of bracket never fell below level");
    hi = lo;
    fhi = flo;
    width *= 2.0;
    lo = hi - width;
    flo = cdf(lo);
  }
  width = scale;
  while (fhi < level) {
    if (++expansions > opts.max_expansions || !std::isfinite(hi))
      throw BracketFailure("upper end of bracket never rose above level");
    lo = hi;
    flo = fhi;
    width *= 2.0;
    hi = lo + width;
    fhi = cdf(hi);
  }

  double best = 0.5 * (lo + hi);
  double best_err = std::numeric_limits<double>::infinity();
  bool use_secant = true;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    double x = 0.5 * (lo + hi);
    if (use_secant && fhi > flo) {
      const double s = lo + (level - flo) * (hi - lo) / (fhi - flo);
      // keep secant proposals away from the bracket ends
      const double margin = 1e-3 * (hi - lo);
      if (s > lo + margin && s < hi - margin) x = s;
    }
    if (x <= lo || x >= hi) break;  // bracket exhausted at double resolution
    const double fx = cdf(x);
    const double err = std::abs(fx - level);
    if (err < best_err) {
      best_err = err;
      best = x;
    }
    if (err <= opts.tol) return x;
    if (fx < level) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    use_secant = !use_secant;  // alternate so the bracket always shrinks
  }
  return best;
}

bool is_lower_triangular(const MatrixXd& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = i + 1; j < a.cols(); ++j)
      if (a(i, j) != 0.0) return false;
  return true;
}

double ks_uniform_statistic(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = std::clamp(u[i], 0.0, 1.0);
    d = std::max(d, static_cast<double>(i + 1) / n - v);
    d = std::max(d, v - static_cast<double>(i) / n);
  }
  return d;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi theta form of the CDF converges fast for small lambda
    const double c = -std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      cdf += std::exp(c * m * m);
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sf = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sf += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(sf, 0.0, 1.0);
}

double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  return kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
}

double ks_critical_value(std::size_t n, double alpha) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (ks_pvalue(mid, n) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace idlab::num
