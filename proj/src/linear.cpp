#include "idlab/linear.hpp"

#include <cmath>
#include <stdexcept>

#include "idlab/errors.hpp"

namespace idlab {

LinearGenerator::LinearGenerator(MatrixXd loading, VectorXd offset)
    : loading_(std::move(loading)), offset_(std::move(offset)) {
  if (loading_.rows() != offset_.size())
    throw DimensionMismatch("linear generator: offset length differs from loading rows");
  if (loading_.cols() == 0 || loading_.rows() < loading_.cols())
    throw RankDeficient("linear generator: loading must be tall with d_x >= d_z");
  if (num::rank(loading_) != static_cast<std::size_t>(loading_.cols()))
    throw RankDeficient("linear generator: loading is not of full column rank");
  pinv_ = num::pinv(loading_);
}

LinearGenerator::LinearGenerator(MatrixXd loading)
    : LinearGenerator(loading, VectorXd::Zero(loading.rows())) {}

VectorXd LinearGenerator::forward(const VectorXd& z) const {
  if (static_cast<std::size_t>(z.size()) != latent_dim())
    throw DimensionMismatch("linear generator: latent has wrong dimension");
  return offset_ + loading_ * z;
}

VectorXd LinearGenerator::inverse(const VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != obs_dim())
    throw DimensionMismatch("linear generator: observation has wrong dimension");
  return pinv_ * (x - offset_);
}

Json LinearGenerator::to_json() const {
  return Json{{"loading", matrix_to_json(loading_)}, {"offset", vector_to_json(offset_)}};
}

EnvConstraintSystem::EnvConstraintSystem(std::vector<VectorXd> env_means, std::size_t reference)
    : means_(std::move(env_means)), reference_(reference) {
  if (means_.empty()) throw std::invalid_argument("constraint system: no environments");
  if (reference_ >= means_.size()) throw std::invalid_argument("constraint system: bad reference");
  const auto d = means_.front().size();
  for (const auto& m : means_)
    if (m.size() != d) throw DimensionMismatch("constraint system: mean dimensions differ");
  contrasts_.resize(static_cast<Eigen::Index>(means_.size() - 1), d);
  Eigen::Index r = 0;
  for (std::size_t e = 0; e < means_.size(); ++e) {
    if (e == reference_) continue;
    contrasts_.row(r++) = (means_[e] - means_[reference_]).transpose();
  }
}

std::size_t EnvConstraintSystem::latent_dim() const {
  return static_cast<std::size_t>(means_.front().size());
}

Json Counterexample::to_json() const {
  return Json{{"rotation", matrix_to_json(rotation)},
              {"f2", f2.to_json()},
              {"mean_residual_1", mean_residual_1},
              {"mean_residual_2", mean_residual_2},
              {"covariance_residual", covariance_residual},
              {"loading_distance", loading_distance}};
}

Counterexample rotation_counterexample(const VectorXd& mu1, const VectorXd& mu2,
                                       const LinearGenerator& f1) {
  if (mu1.size() != 2 || mu2.size() != 2 || f1.latent_dim() != 2)
    throw DimensionMismatch("rotation counterexample is defined for a two-dimensional latent");
  const VectorXd delta = mu2 - mu1;
  const double n2 = delta.squaredNorm();
  if (std::sqrt(n2) < 1e-12) throw DegenerateMeans("environment means coincide");
  // x: delta turned by 90 degrees, so |x| = |delta|
  Eigen::Matrix2d basis;
  basis.col(0) = delta;
  basis.col(1) << -delta(1), delta(0);
  const Eigen::Matrix2d r =
      basis * Eigen::Vector2d(1.0, -1.0).asDiagonal() * basis.transpose() / n2;

  const MatrixXd& f = f1.loading();
  const MatrixXd f2 = f * r;
  const VectorXd a2 = f1.offset() - f * r * mu1 + f * mu1;
  Counterexample out{LinearGenerator(f2, a2), r};
  out.mean_residual_1 = (f1.forward(mu1) - out.f2.forward(mu1)).norm();
  out.mean_residual_2 = (f1.forward(mu2) - out.f2.forward(mu2)).norm();
  out.covariance_residual = (f * f.transpose() - f2 * f2.transpose()).norm();
  out.loading_distance = (f - f2).norm();
  return out;
}

Json UniquenessReport::to_json() const {
  return Json{{"n_envs", n_envs},
              {"latent_dim", latent_dim},
              {"contrast_rank", contrast_rank},
              {"unique", unique},
              {"residual", residual},
              {"recovered_distance", recovered_distance}};
}

UniquenessReport solve_multi_env_linear(const LinearGenerator& f1,
                                        const EnvConstraintSystem& system) {
  if (system.latent_dim() != f1.latent_dim())
    throw DimensionMismatch("constraint system and generator latent dims differ");
  UniquenessReport rep;
  rep.n_envs = system.env_means().size();
  rep.latent_dim = f1.latent_dim();
  const MatrixXd& m = system.contrasts();
  const MatrixXd& f = f1.loading();
  if (m.rows() == 0) {
    // nothing constrains F beyond the shared covariance
    rep.recovered = MatrixXd::Zero(f.rows(), f.cols());
    rep.recovered_distance = f.norm();
    return rep;
  }
  rep.contrast_rank = num::rank(m);
  rep.unique = rep.contrast_rank == rep.latent_dim;
  // F_2 M^T = F_1 M^T, minimum-norm solution
  const MatrixXd rhs = f * m.transpose();
  rep.recovered = rhs * num::pinv(m.transpose());
  rep.residual = (rep.recovered * m.transpose() - rhs).norm();
  rep.recovered_distance = (rep.recovered - f).norm();
  return rep;
}

bool comon_structure_check(const MatrixXd& a, double tol) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw DimensionMismatch("comon_structure_check needs a square matrix");
  if (num::condition_number(a) > 1e12) throw SingularMatrix("matrix is numerically singular");
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const auto big = (a.col(j).array().abs() > tol).count();
    if (big != 1) return false;
  }
  return true;
}

MatrixXd linear_generator_transform(const LinearGenerator& fa, const LinearGenerator& fb) {
  if (fa.obs_dim() != fb.obs_dim() || fa.latent_dim() != fb.latent_dim())
    throw DimensionMismatch("linear generators have different shapes");
  const MatrixXd proj = fb.loading() * fb.pseudo_inverse();
  for (Eigen::Index j = 0; j < fa.loading().cols(); ++j) {
    const VectorXd col = fa.loading().col(j);
    const double resid = (col - proj * col).norm();
    if (resid >= 1e-8 * std::max(1.0, col.norm()))
      throw RangeMismatch("column " + std::to_string(j) + " of F_a leaves the range of F_b");
  }
  return fb.pseudo_inverse() * fa.loading();
}

Automorphism linear_generator_automorphism(const LinearGenerator& fa, const LinearGenerator& fb) {
  const MatrixXd a = linear_generator_transform(fa, fb);
  const VectorXd shift = fa.offset() - fb.offset();
  if ((shift - fb.loading() * (fb.pseudo_inverse() * shift)).norm() >= 1e-8 * std::max(1.0, shift.norm()))
    throw RangeMismatch("offset difference leaves the range of F_b");
  return Automorphism::affine(a, fb.pseudo_inverse() * shift, "linear_transform");
}

Json matrix_to_json(const MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ConfigError("matrix must be a non-empty array of rows");
  const std::size_t r = j.size(), c = j.front().size();
  MatrixXd m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (j[i].size() != c) throw ConfigError("matrix rows have different lengths");
    for (std::size_t k = 0; k < c; ++k) {
      if (!j[i][k].is_number()) throw ConfigError("matrix entries must be numbers");
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

Json vector_to_json(const VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("vector must be an array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("vector entries must be numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

}  // namespace idlab
