#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "idlab/indeterminacy.hpp"
#include "idlab/linear.hpp"
#include "idlab/measures.hpp"
#include "idlab/model.hpp"
#include "idlab/transport.hpp"

namespace idlab {

/// Environment-indexed latent priors sharing one generator. When every prior
/// is an ExpFamily over one structure, the natural parameters are stacked as
/// the rows of eta_matrix().
class EnvironmentSet {
 public:
  EnvironmentSet(std::vector<std::string> labels, std::vector<DistributionPtr> priors);
  /// Shared-statistic form; checks the densities against m exp(eta^T T - a) on a grid.
  static EnvironmentSet from_expfam(std::vector<std::string> labels,
                                    std::vector<std::shared_ptr<const ExpFamily>> priors);
  /// N(eta_e, I) environments.
  static EnvironmentSet gaussian_means(const std::vector<VectorXd>& etas);

  std::size_t size() const { return priors_.size(); }
  std::size_t dim() const { return priors_.front()->dim(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<DistributionPtr>& priors() const { return priors_; }
  const DistributionPtr& prior(const std::string& label) const;

  bool has_shared_stat() const { return !expfam_.empty(); }
  const ExpFamily::Structure& shared_stat() const;
  const std::vector<std::shared_ptr<const ExpFamily>>& expfam_priors() const { return expfam_; }
  MatrixXd eta_matrix() const;

 private:
  std::vector<std::string> labels_;
  std::vector<DistributionPtr> priors_;
  std::vector<std::shared_ptr<const ExpFamily>> expfam_;
};

struct Dataset {
  MatrixXd x;
  MatrixXd z;
  std::vector<std::size_t> env;  // index into env_labels
  std::vector<std::string> env_labels;

  std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
  /// Rows of x (or z) belonging to environment e.
  MatrixXd x_of(std::size_t e) const;
  MatrixXd z_of(std::size_t e) const;
  /// Header x_1..x_dx, z_1..z_dz, env.
  void write_csv(const std::string& path) const;
  static Dataset read_csv(const std::string& path);
};

/// X = f(Z) + noise_sd * N(0, I), n_per_env draws per environment.
Dataset generate_environment_data(const EnvironmentSet& envs, const Generator& generator,
                                  double noise_sd, std::size_t n_per_env, RngStream& rng);

struct SpanReport {
  std::size_t stat_dim = 0;
  std::size_t raw_rank = 0;
  std::size_t contrast_rank = 0;
  bool spans = false;
  Json to_json() const;
};

SpanReport spanning_check(const std::vector<VectorXd>& etas);

struct ValidationReport {
  bool pass = false;
  std::string failing_clause;  // "spanning", "base_measure", "injectivity" or empty
  SpanReport span;
  double min_log_base_measure = 0.0;
  bool injective_coordinate_monotone = false;
  Json to_json() const;
};

struct StrongVaeOptions {
  /// Coordinate (0-based) of T declared strictly monotone along the same latent coordinate.
  std::size_t injective_coordinate = 0;
  double grid_radius = 4.0;
  std::size_t grid_points = 41;
};

ValidationReport validate_strong_vae_config(const EnvironmentSet& envs,
                                            const StrongVaeOptions& opts = {});

struct AffineRelation {
  MatrixXd L;  // T_b = L^T T_a + d, row-wise T_b = T_a L + d^T
  VectorXd d;
  double residual = 0.0;  // root-mean-square misfit
  double condition = 0.0;
  Json to_json() const;
};

AffineRelation affine_relation_fit(const MatrixXd& t_a, const MatrixXd& t_b);

/// Affine TMI map sending the prior to N(sample mean, sample covariance).
TriangularMap fit_gaussian_kr(const MatrixXd& samples, const GaussianDistribution& target_prior);
/// Same from given moments.
TriangularMap fit_gaussian_kr_moments(const VectorXd& mean, const MatrixXd& cov,
                                      const GaussianDistribution& target_prior);

/// Component-wise TMI map sending the prior to the empirical marginals, piecewise
/// linear between quantile knots with linear tails.
TriangularMap fit_marginal_quantile_transport(const MatrixXd& samples,
                                              const ProductDistribution& target_prior,
                                              std::size_t grid_size);

/// Affine generator x = alpha + F z from per-environment sample means of x
/// and fixed environment means of z, by least squares over environments.
LinearGenerator fit_multi_env_affine(const std::vector<VectorXd>& x_means,
                                     const std::vector<VectorXd>& z_means);

/// Linear fit whose latent gauge is chosen by whitening the pooled
/// within-environment covariance; the environment means are learned.
enum class Whitening { Cholesky, Symmetric };
struct LearnedPriorFit {
  LinearGenerator generator;
  std::vector<VectorXd> latent_means;
};
LearnedPriorFit fit_learned_prior_linear(const Dataset& data, Whitening gauge);

class MultiViewModel {
 public:
  MultiViewModel(std::vector<std::string> labels, std::vector<Generator> views);
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Generator>& views() const { return views_; }
  std::size_t latent_dim() const { return views_.front().latent_dim(); }

 private:
  std::vector<std::string> labels_;
  std::vector<Generator> views_;
};

struct MultiViewReport {
  std::vector<std::string> labels;
  std::vector<double> identity_sup_dev;  // per view
  double max_disagreement = 0.0;         // max pairwise sup difference of transforms
  bool any_identity = false;
  bool identified = false;
  double tol = 0.0;
  Json to_json() const;
};

/// Per-view generator transforms on n prior samples; identified when some
/// view's transform is the identity and all transforms agree within tol.
MultiViewReport verify_multiview(const MultiViewModel& model_a, const MultiViewModel& model_b,
                                 const Distribution& prior, std::size_t n, RngStream& rng,
                                 double tol = 1e-6);

}  // namespace idlab
