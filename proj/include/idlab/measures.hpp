#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "idlab/automorphism.hpp"
#include "idlab/numerics.hpp"
#include "idlab/rng.hpp"

namespace idlab {

using Json = nlohmann::json;

/// Default CDF-scale tolerance of conditional quantile inversion.
inline constexpr double kQuantileTol = 1e-10;

/// Probability measure on R^d with a Lebesgue density.
///
/// Coordinates are 0-based. `conditional_cdf(m, prefix, v)` is the CDF of
/// coordinate m given coordinates 0..m-1 equal to `prefix` (length m). The
/// base implementation marginalizes the density numerically with adaptive
/// quadrature over `truncation(coord)`; concrete families override it with
/// closed forms. Instances are immutable and safe to share across threads.
class Distribution {
 public:
  virtual ~Distribution() = default;

  virtual std::string kind() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double log_density(const VectorXd& z) const = 0;
  double density(const VectorXd& z) const;

  virtual bool full_support() const { return true; }

  virtual double conditional_cdf(std::size_t m, const VectorXd& prefix, double v) const;
  virtual double conditional_quantile(std::size_t m, const VectorXd& prefix, double p,
                                      double tol) const;

  /// n x d matrix of i.i.d. draws. The default draws by the inverse
  /// Rosenblatt transform of uniforms.
  virtual MatrixXd sample(RngStream& rng, std::size_t n) const;

  /// Rough center and spread of the conditional law, used to seed brackets.
  virtual double location_hint(std::size_t m, const VectorXd& prefix) const;
  virtual double scale_hint(std::size_t m) const;
  /// Integration window for coordinate `coord`; excluded tail mass must be
  /// negligible (below 1e-12) for the quadrature fallback to be accurate.
  virtual std::pair<double, double> truncation(std::size_t coord) const;

  /// Tagged JSON record; throws ConfigError when the family has no record form.
  virtual Json to_json() const;
};

using DistributionPtr = std::shared_ptr<const Distribution>;

/// Conditional CDF computed by quadrature of the joint density, independent of
/// any closed form a subclass provides. Exposed for cross-checks.
double quadrature_conditional_cdf(const Distribution& dist, std::size_t m, const VectorXd& prefix,
                                  double v);
/// Numeric quantile inversion of dist.conditional_cdf (bisection + secant).
double numeric_conditional_quantile(const Distribution& dist, std::size_t m,
                                    const VectorXd& prefix, double p, double tol);

/// Validated entry points.
MatrixXd sample(const Distribution& dist, RngStream& rng, std::size_t n);
double conditional_quantile(const Distribution& dist, std::size_t m, const VectorXd& prefix,
                            double p, double tol = kQuantileTol);

/// Rosenblatt transform: z -> (F_1(z_1), F_2(z_2 | z_1), ...).
VectorXd rosenblatt(const Distribution& dist, const VectorXd& z);

// ---------------------------------------------------------------------------

class GaussianDistribution final : public Distribution {
 public:
  GaussianDistribution(VectorXd mean, MatrixXd cov);
  static std::shared_ptr<GaussianDistribution> standard(std::size_t d);

  std::string kind() const override { return "gaussian"; }
  std::size_t dim() const override { return static_cast<std::size_t>(mean_.size()); }
  double log_density(const VectorXd& z) const override;
  double conditional_cdf(std::size_t m, const VectorXd& prefix, double v) const override;
  double conditional_quantile(std::size_t m, const VectorXd& prefix, double p,
                              double tol) const override;
  MatrixXd sample(RngStream& rng, std::size_t n) const override;
  double location_hint(std::size_t m, const VectorXd& prefix) const override;
  double scale_hint(std::size_t m) const override;
  std::pair<double, double> truncation(std::size_t coord) const override;
  Json to_json() const override;

  const VectorXd& mean() const { return mean_; }
  const MatrixXd& covariance() const { return cov_; }
  /// Lower Cholesky factor L with L L^T = covariance.
  const MatrixXd& cholesky() const { return chol_; }

  /// Mean of coordinate m given the prefix; the conditional sd is cholesky()(m, m).
  double conditional_mean(std::size_t m, const VectorXd& prefix) const;
  /// Log density of the marginal of the first prefix.size() coordinates.
  double prefix_log_density(const VectorXd& prefix) const;

 private:
  VectorXd mean_;
  MatrixXd cov_;
  MatrixXd chol_;
};

/// One-dimensional family with closed-form CDF and quantile.
class UnivariateDistribution : public Distribution {
 public:
  std::size_t dim() const final { return 1; }
  virtual double log_pdf(double v) const = 0;
  virtual double cdf(double v) const = 0;
  virtual double quantile(double p) const = 0;
  virtual double draw(RngStream& rng) const { return quantile(rng.uniform()); }

  double log_density(const VectorXd& z) const final { return log_pdf(z(0)); }
  double conditional_cdf(std::size_t m, const VectorXd& prefix, double v) const final;
  double conditional_quantile(std::size_t m, const VectorXd& prefix, double p,
                              double tol) const override;
  MatrixXd sample(RngStream& rng, std::size_t n) const final;
};

class LaplaceDistribution final : public UnivariateDistribution {
 public:
  LaplaceDistribution(double loc, double scale);
  std::string kind() const override { return "laplace"; }
  double log_pdf(double v) const override;
  double cdf(double v) const override;
  double quantile(double p) const override;
  double location_hint(std::size_t, const VectorXd&) const override { return loc_; }
  double scale_hint(std::size_t) const override { return scale_; }
  std::pair<double, double> truncation(std::size_t) const override;
  Json to_json() const override;

 private:
  double loc_, scale_;
};

class LogisticDistribution final : public UnivariateDistribution {
 public:
  LogisticDistribution(double loc, double scale);
  std::string kind() const override { return "logistic"; }
  double log_pdf(double v) const override;
  double cdf(double v) const override;
  double quantile(double p) const override;
  double location_hint(std::size_t, const VectorXd&) const override { return loc_; }
  double scale_hint(std::size_t) const override { return scale_; }
  std::pair<double, double> truncation(std::size_t) const override;
  Json to_json() const override;

 private:
  double loc_, scale_;
};

/// Exponential law on [0, inf). Not fully supported on R: it is shipped for
/// sampling and moment checks only, and transport constructions reject it.
class ExponentialDistribution final : public UnivariateDistribution {
 public:
  explicit ExponentialDistribution(double rate);
  std::string kind() const override { return "exponential"; }
  bool full_support() const override { return false; }
  double log_pdf(double v) const override;
  double cdf(double v) const override;
  double quantile(double p) const override;
  double location_hint(std::size_t, const VectorXd&) const override { return 1.0 / rate_; }
  double scale_hint(std::size_t) const override { return 1.0 / rate_; }
  std::pair<double, double> truncation(std::size_t) const override;
  Json to_json() const override;

 private:
  double rate_;
};

/// Finite Gaussian mixture on R^d with closed-form conditionals: the law of
/// coordinate m given a prefix is a Gaussian mixture whose weights are the
/// posterior component probabilities of the prefix.
class GaussianMixtureDistribution final : public Distribution {
 public:
  GaussianMixtureDistribution(std::vector<double> weights, std::vector<GaussianDistribution> comps);

  std::string kind() const override { return "mixture"; }
  std::size_t dim() const override { return comps_.front().dim(); }
  double log_density(const VectorXd& z) const override;
  double conditional_cdf(std::size_t m, const VectorXd& prefix, double v) const override;
  double conditional_quantile(std::size_t m, const VectorXd& prefix, double p,
                              double tol) const override;
  MatrixXd sample(RngStream& rng, std::size_t n) const override;
  double location_hint(std::size_t m, const VectorXd& prefix) const override;
  double scale_hint(std::size_t m) const override;
  std::pair<double, double> truncation(std::size_t coord) const override;
  Json to_json() const override;

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<GaussianDistribution>& components() const { return comps_; }

 private:
  std::vector<double> posterior_weights(const VectorXd& prefix) const;

  std::vector<double> weights_;
  std::vector<GaussianDistribution> comps_;
};

/// Independent coordinates; every marginal must be one-dimensional.
class ProductDistribution final : public Distribution {
 public:
  explicit ProductDistribution(std::vector<DistributionPtr> marginals);

  std::string kind() const override { return "product"; }
  std::size_t dim() const override { return marginals_.size(); }
  bool full_support() const override;
  double log_density(const VectorXd& z) const override;
  double conditional_cdf(std::size_t m, const VectorXd& prefix, double v) const override;
  double conditional_quantile(std::size_t m, const VectorXd& prefix, double p,
                              double tol) const override;
  MatrixXd sample(RngStream& rng, std::size_t n) const override;
  double location_hint(std::size_t m, const VectorXd& prefix) const override;
  double scale_hint(std::size_t m) const override;
  std::pair<double, double> truncation(std::size_t coord) const override;
  Json to_json() const override;

  const std::vector<DistributionPtr>& marginals() const { return marginals_; }

 private:
  std::vector<DistributionPtr> marginals_;
};

/// Exponential family m(z) exp(eta^T T(z) - a(eta)).
class ExpFamily final : public Distribution {
 public:
  using ScalarFn = std::function<double(const VectorXd&)>;
  using StatFn = std::function<VectorXd(const VectorXd&)>;

  struct Structure {
    std::string family_id;  // identifies (m, T, a); compared by name
    std::size_t dim = 0;
    std::size_t stat_dim = 0;
    ScalarFn log_base_measure;
    StatFn suff_stat;
    ScalarFn log_partition;  // of eta
    std::vector<std::pair<double, double>> truncation;  // per coordinate
    // Optional closed forms for families whose density factorizes over
    // coordinates: CDF and quantile of coordinate m given eta.
    std::function<double(const VectorXd& eta, std::size_t m, double v)> coord_cdf;
    std::function<double(const VectorXd& eta, std::size_t m, double p)> coord_quantile;
  };

  ExpFamily(std::shared_ptr<const Structure> structure, VectorXd eta);

  /// N(eta, I_d): m = standard normal density, T(z) = z, a(eta) = |eta|^2 / 2.
  static std::shared_ptr<ExpFamily> gaussian_mean(const VectorXd& eta);
  /// m(z) = exp(-sum z_i^4 / 4), T(z) = z, log partition by quadrature.
  static std::shared_ptr<ExpFamily> quartic_mean(const VectorXd& eta);

  std::string kind() const override { return "expfam"; }
  std::size_t dim() const override { return structure_->dim; }
  std::size_t stat_dim() const { return structure_->stat_dim; }
  double log_density(const VectorXd& z) const override;
  double conditional_cdf(std::size_t m, const VectorXd& prefix, double v) const override;
  double conditional_quantile(std::size_t m, const VectorXd& prefix, double p,
                              double tol) const override;
  double base_measure(const VectorXd& z) const;
  VectorXd suff_stat(const VectorXd& z) const { return structure_->suff_stat(z); }
  double log_partition(const VectorXd& eta) const { return structure_->log_partition(eta); }
  const VectorXd& eta() const { return eta_; }
  const Structure& structure() const { return *structure_; }
  std::shared_ptr<const Structure> structure_ptr() const { return structure_; }
  /// Same structure with a new natural parameter.
  std::shared_ptr<ExpFamily> with_eta(const VectorXd& eta) const;

  std::pair<double, double> truncation(std::size_t coord) const override;
  Json to_json() const override;

 private:
  std::shared_ptr<const Structure> structure_;
  VectorXd eta_;
  double log_partition_value_;
};

/// log p_a(z) - log p_b(z) = (eta_a - eta_b)^T T(z) - a(eta_a) + a(eta_b).
/// Throws MismatchedFamily unless both share one structure.
double expfam_density_ratio_log(const ExpFamily& fam_a, const ExpFamily& fam_b, const VectorXd& z);

/// Law of A(Z) for Z ~ base, with density by change of variables.
class TransportedDistribution final : public Distribution {
 public:
  TransportedDistribution(DistributionPtr base, Automorphism map, double fd_step = 1e-5);

  std::string kind() const override { return "transported"; }
  std::size_t dim() const override { return base_->dim(); }
  bool full_support() const override { return base_->full_support(); }
  double log_density(const VectorXd& y) const override;
  double conditional_cdf(std::size_t m, const VectorXd& prefix, double v) const override;
  MatrixXd sample(RngStream& rng, std::size_t n) const override;
  double location_hint(std::size_t m, const VectorXd& prefix) const override;
  double scale_hint(std::size_t m) const override;
  std::pair<double, double> truncation(std::size_t coord) const override;

  const Distribution& base() const { return *base_; }
  const Automorphism& map() const { return map_; }

 private:
  DistributionPtr base_;
  Automorphism map_;
  double fd_step_;
  bool increasing_1d_ = true;
};

/// A_# base, specialized where the family is closed under A (Gaussian under
/// affine maps, products under component-wise maps).
DistributionPtr pushforward(const DistributionPtr& base, const Automorphism& map);

DistributionPtr distribution_from_json(const Json& spec);

}  // namespace idlab
