#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "idlab/automorphism.hpp"
#include "idlab/measures.hpp"

namespace idlab {

/// x = offset + loading * z with a full column rank d_x x d_z loading.
class LinearGenerator {
 public:
  LinearGenerator(MatrixXd loading, VectorXd offset);
  explicit LinearGenerator(MatrixXd loading);

  std::size_t obs_dim() const { return static_cast<std::size_t>(loading_.rows()); }
  std::size_t latent_dim() const { return static_cast<std::size_t>(loading_.cols()); }
  const MatrixXd& loading() const { return loading_; }
  const VectorXd& offset() const { return offset_; }

  VectorXd forward(const VectorXd& z) const;
  /// Left inverse through the pseudoinverse; exact on the image.
  VectorXd inverse(const VectorXd& x) const;
  const MatrixXd& pseudo_inverse() const { return pinv_; }

  Json to_json() const;

 private:
  MatrixXd loading_;
  VectorXd offset_;
  MatrixXd pinv_;
};

/// Environment means and their contrasts against a reference environment.
class EnvConstraintSystem {
 public:
  explicit EnvConstraintSystem(std::vector<VectorXd> env_means, std::size_t reference = 0);

  const std::vector<VectorXd>& env_means() const { return means_; }
  std::size_t reference() const { return reference_; }
  std::size_t latent_dim() const;
  /// Rows mu_e - mu_ref for every e != ref, in environment order.
  const MatrixXd& contrasts() const { return contrasts_; }

 private:
  std::vector<VectorXd> means_;
  std::size_t reference_;
  MatrixXd contrasts_;
};

struct Counterexample {
  LinearGenerator f2;
  MatrixXd rotation;
  /// |alpha_1 + F_1 mu_e - alpha_2 - F_2 mu_e| for e = 1, 2.
  double mean_residual_1 = 0.0;
  double mean_residual_2 = 0.0;
  /// |F_1 F_1^T - F_2 F_2^T|_F
  double covariance_residual = 0.0;
  /// |F_1 - F_2|_F
  double loading_distance = 0.0;
  Json to_json() const;
};

/// Two environments N(mu_1, I), N(mu_2, I) in R^2 cannot pin down F: the
/// reflection R with eigenvalue 1 on mu_2 - mu_1 and -1 on the orthogonal
/// direction yields a second generator with the same observed laws.
Counterexample rotation_counterexample(const VectorXd& mu1, const VectorXd& mu2,
                                       const LinearGenerator& f1);

struct UniquenessReport {
  std::size_t n_envs = 0;
  std::size_t latent_dim = 0;
  std::size_t contrast_rank = 0;
  bool unique = false;
  /// Minimum-norm F_2 solving F_2 M^T = F_1 M^T, and its residual.
  MatrixXd recovered;
  double residual = 0.0;
  double recovered_distance = 0.0;
  Json to_json() const;
};

UniquenessReport solve_multi_env_linear(const LinearGenerator& f1, const EnvConstraintSystem& system);

/// Every column has exactly one entry above tol in absolute value.
/// Throws SingularMatrix when cond(A) > 1e12.
bool comon_structure_check(const MatrixXd& a, double tol);

/// F_b^+ F_a; throws RangeMismatch when the column spaces differ.
MatrixXd linear_generator_transform(const LinearGenerator& fa, const LinearGenerator& fb);
/// The full affine map f_b^{-1} o f_a, offsets included.
Automorphism linear_generator_automorphism(const LinearGenerator& fa, const LinearGenerator& fb);

Json matrix_to_json(const MatrixXd& m);
MatrixXd matrix_from_json(const Json& j);
Json vector_to_json(const VectorXd& v);
VectorXd vector_from_json(const Json& j);

}  // namespace idlab
