#include "idlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "idlab/errors.hpp"

namespace idlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

VectorXd append(const VectorXd& head, double v) {
  VectorXd out(head.size() + 1);
  out.head(head.size()) = head;
  out(head.size()) = v;
  return out;
}

// Density of the marginal law of the first q.size() coordinates.
double marginal_density(const Distribution& dist, const VectorXd& q) {
  const std::size_t k = static_cast<std::size_t>(q.size());
  if (k == dist.dim()) return std::exp(dist.log_density(q));
  const auto [lo, hi] = dist.truncation(k);
  return num::integrate([&](double t) { return marginal_density(dist, append(q, t)); }, lo, hi,
                        1e-10);
}

double log_sum_exp(const std::vector<double>& v) {
  double mx = -kInf;
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

VectorXd json_vector(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

MatrixXd json_matrix(const Json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j.at(0).is_array())
    throw ConfigError(std::string(what) + " must be a non-empty array of rows");
  const std::size_t r = j.size(), c = j.at(0).size();
  MatrixXd m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (j.at(i).size() != c) throw ConfigError(std::string(what) + " has ragged rows");
    for (std::size_t k = 0; k < c; ++k) m(i, k) = j.at(i).at(k).get<double>();
  }
  return m;
}

Json vector_json(const VectorXd& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Json matrix_json(const MatrixXd& m) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    j.push_back(row);
  }
  return j;
}

void check_coordinate(const Distribution& d, std::size_t m, const VectorXd& prefix) {
  if (m >= d.dim()) throw DimensionMismatch("coordinate index out of range");
  if (static_cast<std::size_t>(prefix.size()) != m)
    throw DimensionMismatch("prefix length must equal the coordinate index");
}

}  // namespace

// --- Distribution ----------------------------------------------------------

double Distribution::density(const VectorXd& z) const { return std::exp(log_density(z)); }

double Distribution::conditional_cdf(std::size_t m, const VectorXd& prefix, double v) const {
  return quadrature_conditional_cdf(*this, m, prefix, v);
}

double Distribution::conditional_quantile(std::size_t m, const VectorXd& prefix, double p,
                                          double tol) const {
  return numeric_conditional_quantile(*this, m, prefix, p, tol);
}

MatrixXd Distribution::sample(RngStream& rng, std::size_t n) const {
  const std::size_t d = dim();
  MatrixXd out(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    VectorXd z(d);
    for (std::size_t m = 0; m < d; ++m)
      z(m) = conditional_quantile(m, z.head(m), rng.uniform(), kQuantileTol);
    out.row(r) = z.transpose();
  }
  return out;
}

double Distribution::location_hint(std::size_t, const VectorXd&) const { return 0.0; }
double Distribution::scale_hint(std::size_t) const { return 1.0; }
std::pair<double, double> Distribution::truncation(std::size_t) const { return {-40.0, 40.0}; }

Json Distribution::to_json() const {
  throw ConfigError("distribution kind '" + kind() + "' has no JSON record form");
}

double quadrature_conditional_cdf(const Distribution& dist, std::size_t m, const VectorXd& prefix,
                                  double v) {
  check_coordinate(dist, m, prefix);
  const auto [lo, hi] = dist.truncation(m);
  if (v <= lo) return 0.0;
  auto g = [&](double t) { return marginal_density(dist, append(prefix, t)); };
  const double total = num::integrate(g, lo, hi, 1e-12);
  if (!(total > 0.0)) return v >= hi ? 1.0 : 0.0;
  if (v >= hi) return 1.0;
  // integrate the shorter side for accuracy in the tails
  const double mid = dist.location_hint(m, prefix);
  if (v <= mid) return std::clamp(num::integrate(g, lo, v, 1e-12) / total, 0.0, 1.0);
  return std::clamp(1.0 - num::integrate(g, v, hi, 1e-12) / total, 0.0, 1.0);
}

double numeric_conditional_quantile(const Distribution& dist, std::size_t m,
                                    const VectorXd& prefix, double p, double tol) {
  num::RootOptions opts;
  opts.tol = tol;
  return num::solve_increasing([&](double v) { return dist.conditional_cdf(m, prefix, v); }, p,
                               dist.location_hint(m, prefix), dist.scale_hint(m), opts);
}

MatrixXd sample(const Distribution& dist, RngStream& rng, std::size_t n) {
  if (n < 1) throw std::invalid_argument("sample: n must be at least 1");
  return dist.sample(rng, n);
}

double conditional_quantile(const Distribution& dist, std::size_t m, const VectorXd& prefix,
                            double p, double tol) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("conditional_quantile: p must be in (0,1)");
  if (!(tol > 0.0)) throw std::invalid_argument("conditional_quantile: tol must be positive");
  if (!dist.full_support())
    throw std::invalid_argument("conditional_quantile: distribution is not fully supported");
  check_coordinate(dist, m, prefix);
  return dist.conditional_quantile(m, prefix, p, tol);
}

VectorXd rosenblatt(const Distribution& dist, const VectorXd& z) {
  VectorXd u(z.size());
  for (Eigen::Index m = 0; m < z.size(); ++m)
    u(m) = dist.conditional_cdf(static_cast<std::size_t>(m), z.head(m), z(m));
  return u;
}

// --- Gaussian ----------------------------------------------------------------

GaussianDistribution::GaussianDistribution(VectorXd mean, MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() == 0) throw std::invalid_argument("GaussianDistribution: empty mean");
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size())
    throw DimensionMismatch("GaussianDistribution: covariance shape does not match mean");
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + cov_.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("GaussianDistribution: covariance is not symmetric");
  cov_ = 0.5 * (cov_ + cov_.transpose());
  Eigen::LLT<MatrixXd> llt(cov_);
  if (llt.info() != Eigen::Success)
    throw SingularCovariance("GaussianDistribution: covariance is not positive definite");
  chol_ = llt.matrixL();
  if ((chol_.diagonal().array() <= 0.0).any())
    throw SingularCovariance("GaussianDistribution: degenerate Cholesky factor");
}

std::shared_ptr<GaussianDistribution> GaussianDistribution::standard(std::size_t d) {
  return std::make_shared<GaussianDistribution>(VectorXd::Zero(d), MatrixXd::Identity(d, d));
}

double GaussianDistribution::conditional_mean(std::size_t m, const VectorXd& prefix) const {
  if (m == 0) return mean_(0);
  const VectorXd w = chol_.topLeftCorner(m, m).triangularView<Eigen::Lower>().solve(
      prefix - mean_.head(m));
  return mean_(m) + chol_.row(m).head(m).dot(w);
}

double GaussianDistribution::prefix_log_density(const VectorXd& prefix) const {
  const Eigen::Index k = prefix.size();
  if (k == 0) return 0.0;
  const VectorXd w = chol_.topLeftCorner(k, k).triangularView<Eigen::Lower>().solve(
      prefix - mean_.head(k));
  return -0.5 * w.squaredNorm() - chol_.diagonal().head(k).array().log().sum() -
         0.5 * static_cast<double>(k) * std::log(2.0 * std::numbers::pi);
}

double GaussianDistribution::log_density(const VectorXd& z) const {
  if (z.size() != mean_.size()) throw DimensionMismatch("Gaussian log_density: wrong dimension");
  return prefix_log_density(z);
}

double GaussianDistribution::conditional_cdf(std::size_t m, const VectorXd& prefix,
                                             double v) const {
  check_coordinate(*this, m, prefix);
  return num::normal_cdf((v - conditional_mean(m, prefix)) / chol_(m, m));
}

double GaussianDistribution::conditional_quantile(std::size_t m, const VectorXd& prefix, double p,
                                                  double) const {
  check_coordinate(*this, m, prefix);
  return conditional_mean(m, prefix) + chol_(m, m) * num::normal_quantile(p);
}

MatrixXd GaussianDistribution::sample(RngStream& rng, std::size_t n) const {
  const Eigen::Index d = mean_.size();
  MatrixXd w(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < d; ++c) w(r, c) = rng.normal();
  MatrixXd out = w * chol_.transpose();
  out.rowwise() += mean_.transpose();
  return out;
}

double GaussianDistribution::location_hint(std::size_t m, const VectorXd& prefix) const {
  return conditional_mean(m, prefix);
}

double GaussianDistribution::scale_hint(std::size_t m) const { return chol_(m, m); }

std::pair<double, double> GaussianDistribution::truncation(std::size_t coord) const {
  const double sd = std::sqrt(cov_(coord, coord));
  return {mean_(coord) - 40.0 * sd, mean_(coord) + 40.0 * sd};
}

Json GaussianDistribution::to_json() const {
  return Json{{"kind", "gaussian"}, {"mean", vector_json(mean_)}, {"cov", matrix_json(cov_)}};
}

// --- univariate families ------------------------------------------------------

double UnivariateDistribution::conditional_cdf(std::size_t m, const VectorXd& prefix,
                                               double v) const {
  check_coordinate(*this, m, prefix);
  return cdf(v);
}

double UnivariateDistribution::conditional_quantile(std::size_t m, const VectorXd& prefix,
                                                    double p, double) const {
  check_coordinate(*this, m, prefix);
  return quantile(p);
}

MatrixXd UnivariateDistribution::sample(RngStream& rng, std::size_t n) const {
  MatrixXd out(n, 1);
  for (std::size_t r = 0; r < n; ++r) out(r, 0) = draw(rng);
  return out;
}

LaplaceDistribution::LaplaceDistribution(double loc, double scale) : loc_(loc), scale_(scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("Laplace: scale must be positive");
}

double LaplaceDistribution::log_pdf(double v) const {
  return -std::abs(v - loc_) / scale_ - std::log(2.0 * scale_);
}

double LaplaceDistribution::cdf(double v) const {
  const double t = (v - loc_) / scale_;
  return t < 0.0 ? 0.5 * std::exp(t) : 1.0 - 0.5 * std::exp(-t);
}

double LaplaceDistribution::quantile(double p) const {
  return p < 0.5 ? loc_ + scale_ * std::log(2.0 * p) : loc_ - scale_ * std::log(2.0 * (1.0 - p));
}

std::pair<double, double> LaplaceDistribution::truncation(std::size_t) const {
  return {loc_ - 60.0 * scale_, loc_ + 60.0 * scale_};
}

Json LaplaceDistribution::to_json() const {
  return Json{{"kind", "laplace"}, {"loc", loc_}, {"scale", scale_}};
}

LogisticDistribution::LogisticDistribution(double loc, double scale) : loc_(loc), scale_(scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("Logistic: scale must be positive");
}

double LogisticDistribution::log_pdf(double v) const {
  const double a = std::abs((v - loc_) / scale_);
  return -a - 2.0 * std::log1p(std::exp(-a)) - std::log(scale_);
}

double LogisticDistribution::cdf(double v) const {
  return 1.0 / (1.0 + std::exp(-(v - loc_) / scale_));
}

double LogisticDistribution::quantile(double p) const {
  return loc_ + scale_ * (std::log(p) - std::log1p(-p));
}

std::pair<double, double> LogisticDistribution::truncation(std::size_t) const {
  return {loc_ - 60.0 * scale_, loc_ + 60.0 * scale_};
}

Json LogisticDistribution::to_json() const {
  return Json{{"kind", "logistic"}, {"loc", loc_}, {"scale", scale_}};
}

ExponentialDistribution::ExponentialDistribution(double rate) : rate_(rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("Exponential: rate must be positive");
}

double ExponentialDistribution::log_pdf(double v) const {
  return v < 0.0 ? -kInf : std::log(rate_) - rate_ * v;
}

double ExponentialDistribution::cdf(double v) const {
  return v <= 0.0 ? 0.0 : -std::expm1(-rate_ * v);
}

double ExponentialDistribution::quantile(double p) const { return -std::log1p(-p) / rate_; }

std::pair<double, double> ExponentialDistribution::truncation(std::size_t) const {
  return {0.0, 60.0 / rate_};
}

Json ExponentialDistribution::to_json() const {
  return Json{{"kind", "exponential"}, {"rate", rate_}};
}

// --- Gaussian mixture -----------------------------------------------------------

GaussianMixtureDistribution::GaussianMixtureDistribution(std::vector<double> weights,
                                                         std::vector<GaussianDistribution> comps)
    : weights_(std::move(weights)), comps_(std::move(comps)) {
  if (comps_.empty() || comps_.size() != weights_.size())
    throw std::invalid_argument("GaussianMixture: need one weight per component");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) throw std::invalid_argument("GaussianMixture: weights must be positive");
    total += w;
  }
  for (double& w : weights_) w /= total;
  for (const auto& c : comps_)
    if (c.dim() != comps_.front().dim())
      throw DimensionMismatch("GaussianMixture: components differ in dimension");
}

std::vector<double> GaussianMixtureDistribution::posterior_weights(const VectorXd& prefix) const {
  if (prefix.size() == 0) return weights_;
  std::vector<double> logw(comps_.size());
  for (std::size_t k = 0; k < comps_.size(); ++k)
    logw[k] = std::log(weights_[k]) + comps_[k].prefix_log_density(prefix);
  const double lse = log_sum_exp(logw);
  for (double& v : logw) v = std::exp(v - lse);
  return logw;
}

double GaussianMixtureDistribution::log_density(const VectorXd& z) const {
  std::vector<double> terms(comps_.size());
  for (std::size_t k = 0; k < comps_.size(); ++k)
    terms[k] = std::log(weights_[k]) + comps_[k].log_density(z);
  return log_sum_exp(terms);
}

double GaussianMixtureDistribution::conditional_cdf(std::size_t m, const VectorXd& prefix,
                                                    double v) const {
  check_coordinate(*this, m, prefix);
  const auto w = posterior_weights(prefix);
  double f = 0.0;
  for (std::size_t k = 0; k < comps_.size(); ++k) f += w[k] * comps_[k].conditional_cdf(m, prefix, v);
  return std::clamp(f, 0.0, 1.0);
}

double GaussianMixtureDistribution::conditional_quantile(std::size_t m, const VectorXd& prefix,
                                                         double p, double tol) const {
  check_coordinate(*this, m, prefix);
  const auto w = posterior_weights(prefix);
  std::vector<double> means(comps_.size());
  for (std::size_t k = 0; k < comps_.size(); ++k) means[k] = comps_[k].conditional_mean(m, prefix);
  auto cdf = [&](double v) {
    double f = 0.0;
    for (std::size_t k = 0; k < comps_.size(); ++k)
      f += w[k] * num::normal_cdf((v - means[k]) / comps_[k].cholesky()(m, m));
    return f;
  };
  double guess = 0.0;
  for (std::size_t k = 0; k < comps_.size(); ++k) guess += w[k] * means[k];
  num::RootOptions opts;
  opts.tol = tol;
  return num::solve_increasing(cdf, p, guess, scale_hint(m), opts);
}

MatrixXd GaussianMixtureDistribution::sample(RngStream& rng, std::size_t n) const {
  MatrixXd out(n, dim());
  for (std::size_t r = 0; r < n; ++r) {
    const double u = rng.uniform();
    std::size_t k = 0;
    double acc = weights_[0];
    while (u > acc && k + 1 < comps_.size()) acc += weights_[++k];
    out.row(r) = comps_[k].sample(rng, 1).row(0);
  }
  return out;
}

double GaussianMixtureDistribution::location_hint(std::size_t m, const VectorXd& prefix) const {
  const auto w = posterior_weights(prefix);
  double g = 0.0;
  for (std::size_t k = 0; k < comps_.size(); ++k) g += w[k] * comps_[k].conditional_mean(m, prefix);
  return g;
}

double GaussianMixtureDistribution::scale_hint(std::size_t m) const {
  double s = 0.0;
  for (const auto& c : comps_) s = std::max(s, std::sqrt(c.covariance()(m, m)));
  return s;
}

std::pair<double, double> GaussianMixtureDistribution::truncation(std::size_t coord) const {
  double lo = kInf, hi = -kInf;
  for (const auto& c : comps_) {
    const auto [l, h] = c.truncation(coord);
    lo = std::min(lo, l);
    hi = std::max(hi, h);
  }
  return {lo, hi};
}

Json GaussianMixtureDistribution::to_json() const {
  Json means = Json::array(), covs = Json::array();
  for (const auto& c : comps_) {
    means.push_back(vector_json(c.mean()));
    covs.push_back(matrix_json(c.covariance()));
  }
  return Json{{"kind", "mixture"}, {"weights", weights_}, {"means", means}, {"covs", covs}};
}

// --- product ------------------------------------------------------------------

ProductDistribution::ProductDistribution(std::vector<DistributionPtr> marginals)
    : marginals_(std::move(marginals)) {
  if (marginals_.empty()) throw std::invalid_argument("ProductDistribution: no marginals");
  for (const auto& m : marginals_)
    if (!m || m->dim() != 1)
      throw DimensionMismatch("ProductDistribution: marginals must be one-dimensional");
}

bool ProductDistribution::full_support() const {
  return std::all_of(marginals_.begin(), marginals_.end(),
                     [](const DistributionPtr& m) { return m->full_support(); });
}

double ProductDistribution::log_density(const VectorXd& z) const {
  if (static_cast<std::size_t>(z.size()) != dim())
    throw DimensionMismatch("Product log_density: wrong dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < marginals_.size(); ++i)
    s += marginals_[i]->log_density(VectorXd::Constant(1, z(i)));
  return s;
}

double ProductDistribution::conditional_cdf(std::size_t m, const VectorXd& prefix,
                                            double v) const {
  check_coordinate(*this, m, prefix);
  return marginals_[m]->conditional_cdf(0, VectorXd(), v);
}

double ProductDistribution::conditional_quantile(std::size_t m, const VectorXd& prefix, double p,
                                                 double tol) const {
  check_coordinate(*this, m, prefix);
  return marginals_[m]->conditional_quantile(0, VectorXd(), p, tol);
}

MatrixXd ProductDistribution::sample(RngStream& rng, std::size_t n) const {
  MatrixXd out(n, dim());
  for (std::size_t i = 0; i < marginals_.size(); ++i) out.col(i) = marginals_[i]->sample(rng, n).col(0);
  return out;
}

double ProductDistribution::location_hint(std::size_t m, const VectorXd&) const {
  return marginals_[m]->location_hint(0, VectorXd());
}

double ProductDistribution::scale_hint(std::size_t m) const { return marginals_[m]->scale_hint(0); }

std::pair<double, double> ProductDistribution::truncation(std::size_t coord) const {
  return marginals_[coord]->truncation(0);
}

Json ProductDistribution::to_json() const {
  Json ms = Json::array();
  for (const auto& m : marginals_) ms.push_back(m->to_json());
  return Json{{"kind", "product"}, {"marginals", ms}};
}

// --- exponential family -------------------------------------------------------------

ExpFamily::ExpFamily(std::shared_ptr<const Structure> structure, VectorXd eta)
    : structure_(std::move(structure)), eta_(std::move(eta)) {
  if (!structure_ || structure_->dim == 0 || structure_->stat_dim == 0)
    throw std::invalid_argument("ExpFamily: incomplete structure");
  if (static_cast<std::size_t>(eta_.size()) != structure_->stat_dim)
    throw DimensionMismatch("ExpFamily: eta length must equal the statistic dimension");
  log_partition_value_ = structure_->log_partition(eta_);
}

namespace {

std::shared_ptr<const ExpFamily::Structure> gaussian_mean_structure(std::size_t d) {
  auto s = std::make_shared<ExpFamily::Structure>();
  s->family_id = "gaussian_mean";
  s->dim = d;
  s->stat_dim = d;
  s->log_base_measure = [](const VectorXd& z) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) acc += num::normal_log_pdf(z(i));
    return acc;
  };
  s->suff_stat = [](const VectorXd& z) -> VectorXd { return z; };
  s->log_partition = [](const VectorXd& eta) { return 0.5 * eta.squaredNorm(); };
  s->coord_cdf = [](const VectorXd& eta, std::size_t m, double v) {
    return num::normal_cdf(v - eta(static_cast<Eigen::Index>(m)));
  };
  s->coord_quantile = [](const VectorXd& eta, std::size_t m, double p) {
    return eta(static_cast<Eigen::Index>(m)) + num::normal_quantile(p);
  };
  return s;
}

double quartic_log_partition_1d(double eta) {
  // integrand exp(-t^4/4 + eta t) peaks at t = cbrt(eta)
  const double t_star = std::cbrt(eta);
  const double g_star = -std::pow(t_star, 4) / 4.0 + eta * t_star;
  const double integral = num::integrate(
      [&](double t) { return std::exp(-std::pow(t, 4) / 4.0 + eta * t - g_star); },
      t_star - 30.0, t_star + 30.0, 1e-13);
  return g_star + std::log(integral);
}

std::shared_ptr<const ExpFamily::Structure> quartic_mean_structure(std::size_t d) {
  auto s = std::make_shared<ExpFamily::Structure>();
  s->family_id = "quartic_mean";
  s->dim = d;
  s->stat_dim = d;
  s->log_base_measure = [](const VectorXd& z) { return -z.array().pow(4).sum() / 4.0; };
  s->suff_stat = [](const VectorXd& z) -> VectorXd { return z; };
  s->log_partition = [](const VectorXd& eta) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) acc += quartic_log_partition_1d(eta(i));
    return acc;
  };
  s->coord_cdf = [](const VectorXd& eta, std::size_t m, double v) {
    const double e = eta(static_cast<Eigen::Index>(m));
    const double a = quartic_log_partition_1d(e);
    const double lo = std::cbrt(e) - 30.0;
    if (v <= lo) return 0.0;
    const double mass = num::integrate(
        [&](double t) { return std::exp(-std::pow(t, 4) / 4.0 + e * t - a); }, lo, v, 1e-13);
    return std::clamp(mass, 0.0, 1.0);
  };
  return s;
}

}  // namespace

std::shared_ptr<ExpFamily> ExpFamily::gaussian_mean(const VectorXd& eta) {
  return std::make_shared<ExpFamily>(gaussian_mean_structure(static_cast<std::size_t>(eta.size())),
                                     eta);
}

std::shared_ptr<ExpFamily> ExpFamily::quartic_mean(const VectorXd& eta) {
  return std::make_shared<ExpFamily>(quartic_mean_structure(static_cast<std::size_t>(eta.size())),
                                     eta);
}

std::shared_ptr<ExpFamily> ExpFamily::with_eta(const VectorXd& eta) const {
  return std::make_shared<ExpFamily>(structure_, eta);
}

double ExpFamily::log_density(const VectorXd& z) const {
  if (static_cast<std::size_t>(z.size()) != dim())
    throw DimensionMismatch("ExpFamily log_density: wrong dimension");
  return structure_->log_base_measure(z) + eta_.dot(structure_->suff_stat(z)) -
         log_partition_value_;
}

double ExpFamily::conditional_cdf(std::size_t m, const VectorXd& prefix, double v) const {
  if (structure_->coord_cdf) {
    if (m >= dim()) throw DimensionMismatch("ExpFamily conditional_cdf: coordinate out of range");
    return structure_->coord_cdf(eta_, m, v);
  }
  return Distribution::conditional_cdf(m, prefix, v);
}

double ExpFamily::conditional_quantile(std::size_t m, const VectorXd& prefix, double p,
                                       double tol) const {
  if (structure_->coord_quantile) {
    if (m >= dim()) throw DimensionMismatch("ExpFamily conditional_quantile: coordinate out of range");
    return structure_->coord_quantile(eta_, m, p);
  }
  return Distribution::conditional_quantile(m, prefix, p, tol);
}

double ExpFamily::base_measure(const VectorXd& z) const {
  return std::exp(structure_->log_base_measure(z));
}

std::pair<double, double> ExpFamily::truncation(std::size_t coord) const {
  if (coord < structure_->truncation.size()) return structure_->truncation[coord];
  // natural parameters of the shipped families shift the mode by at most |eta|
  const double shift = coord < static_cast<std::size_t>(eta_.size()) ? std::abs(eta_(coord)) : 0.0;
  return {-12.0 - shift, 12.0 + shift};
}

Json ExpFamily::to_json() const {
  if (structure_->family_id != "gaussian_mean" && structure_->family_id != "quartic_mean")
    return Distribution::to_json();
  return Json{{"kind", "expfam"}, {"family", structure_->family_id}, {"eta", vector_json(eta_)}};
}

double expfam_density_ratio_log(const ExpFamily& fam_a, const ExpFamily& fam_b,
                                const VectorXd& z) {
  const auto& sa = fam_a.structure();
  const auto& sb = fam_b.structure();
  const bool same = fam_a.structure_ptr() == fam_b.structure_ptr() ||
                    (!sa.family_id.empty() && sa.family_id == sb.family_id && sa.dim == sb.dim &&
                     sa.stat_dim == sb.stat_dim);
  if (!same) throw MismatchedFamily("families '" + sa.family_id + "' and '" + sb.family_id + "'");
  return (fam_a.eta() - fam_b.eta()).dot(fam_a.suff_stat(z)) - fam_a.log_partition(fam_a.eta()) +
         fam_b.log_partition(fam_b.eta());
}

// --- transported --------------------------------------------------------------------

TransportedDistribution::TransportedDistribution(DistributionPtr base, Automorphism map,
                                                 double fd_step)
    : base_(std::move(base)), map_(std::move(map)), fd_step_(fd_step) {
  if (!base_) throw std::invalid_argument("TransportedDistribution: null base");
  if (map_.dim() != base_->dim()) throw DimensionMismatch("TransportedDistribution: map dimension");
  if (base_->dim() == 1) {
    const double c = base_->location_hint(0, VectorXd()), s = base_->scale_hint(0);
    increasing_1d_ = map_.forward(VectorXd::Constant(1, c + s))(0) >
                     map_.forward(VectorXd::Constant(1, c - s))(0);
  }
}

double TransportedDistribution::log_density(const VectorXd& y) const {
  const VectorXd z = map_.inverse(y);
  double log_det;
  if (map_.matrix()) {
    log_det = -std::log(std::abs(map_.matrix()->determinant()));
  } else {
    const Eigen::Index d = y.size();
    MatrixXd jac(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      VectorXd yp = y, ym = y;
      yp(j) += fd_step_;
      ym(j) -= fd_step_;
      jac.col(j) = (map_.inverse(yp) - map_.inverse(ym)) / (2.0 * fd_step_);
    }
    log_det = std::log(std::abs(jac.determinant()));
  }
  return base_->log_density(z) + log_det;
}

double TransportedDistribution::conditional_cdf(std::size_t m, const VectorXd& prefix,
                                                double v) const {
  if (dim() == 1) {
    check_coordinate(*this, m, prefix);
    const double f = base_->conditional_cdf(0, VectorXd(), map_.inverse(VectorXd::Constant(1, v))(0));
    return increasing_1d_ ? f : 1.0 - f;
  }
  if (map_.tags().triangular || map_.tags().component_wise) {
    // z_<=m depends on y_<=m only, so trailing coordinates are arbitrary
    check_coordinate(*this, m, prefix);
    VectorXd y = VectorXd::Zero(dim());
    y.head(m) = prefix;
    y(m) = v;
    const VectorXd z = map_.inverse(y);
    const double s = base_->scale_hint(m);
    VectorXd zp = z, zm = z;
    zp(m) += s;
    zm(m) -= s;
    const bool up = map_.forward(zp)(m) > map_.forward(zm)(m);
    const double f = base_->conditional_cdf(m, z.head(m), z(m));
    return up ? f : 1.0 - f;
  }
  return quadrature_conditional_cdf(*this, m, prefix, v);
}

MatrixXd TransportedDistribution::sample(RngStream& rng, std::size_t n) const {
  return map_.forward_rows(base_->sample(rng, n));
}

double TransportedDistribution::location_hint(std::size_t m, const VectorXd&) const {
  VectorXd c(dim());
  for (std::size_t i = 0; i < dim(); ++i) c(i) = base_->location_hint(i, c.head(i));
  return map_.forward(c)(m);
}

double TransportedDistribution::scale_hint(std::size_t m) const {
  const auto [lo, hi] = truncation(m);
  return std::max((hi - lo) / 80.0, 1e-6);
}

std::pair<double, double> TransportedDistribution::truncation(std::size_t coord) const {
  // image of the base truncation box; exact for monotone and affine maps
  const std::size_t d = dim();
  double lo = kInf, hi = -kInf;
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    VectorXd z(d);
    for (std::size_t i = 0; i < d; ++i) {
      const auto [l, h] = base_->truncation(i);
      z(i) = (corner >> i) & 1 ? h : l;
    }
    const double y = map_.forward(z)(coord);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  return {lo, hi};
}

DistributionPtr pushforward(const DistributionPtr& base, const Automorphism& map) {
  if (map.dim() != base->dim()) throw DimensionMismatch("pushforward: map dimension");
  if (const auto* g = dynamic_cast<const GaussianDistribution*>(base.get()); g && map.matrix()) {
    const MatrixXd& a = *map.matrix();
    return std::make_shared<GaussianDistribution>(a * g->mean() + *map.offset(),
                                                  a * g->covariance() * a.transpose());
  }
  if (const auto* p = dynamic_cast<const ProductDistribution*>(base.get());
      p && map.tags().component_wise) {
    const std::size_t d = p->dim();
    VectorXd anchor(d);
    for (std::size_t i = 0; i < d; ++i) anchor(i) = p->location_hint(i, VectorXd());
    std::vector<DistributionPtr> marginals;
    for (std::size_t i = 0; i < d; ++i) {
      auto fwd = [map, anchor, i](const VectorXd& t) -> VectorXd {
        VectorXd z = anchor;
        z(i) = t(0);
        return VectorXd::Constant(1, map.forward(z)(i));
      };
      auto inv = [map, anchor, i](const VectorXd& t) -> VectorXd {
        VectorXd z = map.forward(anchor);
        z(i) = t(0);
        return VectorXd::Constant(1, map.inverse(z)(i));
      };
      StructureTags tags;
      tags.component_wise = tags.triangular = true;
      marginals.push_back(std::make_shared<TransportedDistribution>(
          p->marginals()[i], Automorphism(1, fwd, inv, tags, map.name())));
    }
    return std::make_shared<ProductDistribution>(std::move(marginals));
  }
  return std::make_shared<TransportedDistribution>(base, map);
}

DistributionPtr distribution_from_json(const Json& spec) {
  if (!spec.is_object() || !spec.contains("kind"))
    throw ConfigError("distribution spec must be an object with a 'kind' field");
  const std::string kind = spec.at("kind").get<std::string>();
  try {
    if (kind == "gaussian") {
      if (spec.contains("mean")) {
        const VectorXd mean = json_vector(spec.at("mean"), "gaussian.mean");
        const MatrixXd cov = spec.contains("cov")
                                 ? json_matrix(spec.at("cov"), "gaussian.cov")
                                 : MatrixXd::Identity(mean.size(), mean.size());
        return std::make_shared<GaussianDistribution>(mean, cov);
      }
      return GaussianDistribution::standard(spec.value("dim", std::size_t{1}));
    }
    if (kind == "laplace")
      return std::make_shared<LaplaceDistribution>(spec.value("loc", 0.0), spec.value("scale", 1.0));
    if (kind == "logistic")
      return std::make_shared<LogisticDistribution>(spec.value("loc", 0.0),
                                                    spec.value("scale", 1.0));
    if (kind == "exponential")
      return std::make_shared<ExponentialDistribution>(spec.value("rate", 1.0));
    if (kind == "mixture") {
      const auto& w = spec.at("weights");
      const auto& means = spec.at("means");
      std::vector<GaussianDistribution> comps;
      for (std::size_t k = 0; k < means.size(); ++k) {
        const VectorXd mu = json_vector(means.at(k), "mixture.means[k]");
        const MatrixXd cov = spec.contains("covs") ? json_matrix(spec.at("covs").at(k), "mixture.covs[k]")
                                                   : MatrixXd::Identity(mu.size(), mu.size());
        comps.emplace_back(mu, cov);
      }
      return std::make_shared<GaussianMixtureDistribution>(w.get<std::vector<double>>(),
                                                           std::move(comps));
    }
    if (kind == "product") {
      std::vector<DistributionPtr> ms;
      for (const auto& m : spec.at("marginals")) ms.push_back(distribution_from_json(m));
      return std::make_shared<ProductDistribution>(std::move(ms));
    }
    if (kind == "expfam") {
      const std::string family = spec.at("family").get<std::string>();
      const VectorXd eta = json_vector(spec.at("eta"), "expfam.eta");
      if (family == "gaussian_mean") return ExpFamily::gaussian_mean(eta);
      if (family == "quartic_mean") return ExpFamily::quartic_mean(eta);
      throw ConfigError("unknown exponential family '" + family + "'");
    }
  } catch (const Json::exception& e) {
    throw ConfigError("malformed '" + kind + "' distribution: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("invalid '" + kind + "' distribution: " + e.what());
  } catch (const SingularCovariance& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown distribution kind '" + kind + "'");
}

}  // namespace idlab
