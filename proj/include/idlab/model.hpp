#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "idlab/automorphism.hpp"
#include "idlab/linear.hpp"
#include "idlab/measures.hpp"
#include "idlab/transport.hpp"

namespace idlab {

/// Injective map from the latent space R^{d_z} into R^{d_x} together with a
/// left inverse on its image. Linear and triangular representations are
/// kept when known so that transforms between them stay in closed form.
class Generator {
 public:
  using Fn = std::function<VectorXd(const VectorXd&)>;

  Generator(std::size_t latent_dim, std::size_t obs_dim, Fn forward, Fn inverse,
            std::string name = "explicit");

  static Generator identity(std::size_t dim);
  static Generator from_linear(const LinearGenerator& g);
  static Generator from_triangular(const TriangularMap& map);
  static Generator from_automorphism(const Automorphism& a);
  /// z -> (z, 0) in R^{obs_dim}
  static Generator coordinate_embedding(std::size_t latent_dim, std::size_t obs_dim);

  std::size_t latent_dim() const { return latent_dim_; }
  std::size_t obs_dim() const { return obs_dim_; }
  const std::string& name() const { return name_; }

  VectorXd forward(const VectorXd& z) const;
  VectorXd inverse(const VectorXd& x) const;
  VectorXd operator()(const VectorXd& z) const { return forward(z); }
  MatrixXd forward_rows(const MatrixXd& z) const;
  MatrixXd inverse_rows(const MatrixXd& x) const;

  const std::optional<LinearGenerator>& linear() const { return linear_; }
  const std::optional<TriangularMap>& triangular() const { return triangular_; }

  /// z -> f(a(z)).
  Generator after(const Automorphism& a) const;

  /// Max over rows of |f^{-1}(f(z)) - z|_inf.
  double round_trip_error(const MatrixXd& z) const;

 private:
  std::size_t latent_dim_;
  std::size_t obs_dim_;
  Fn forward_;
  Fn inverse_;
  std::string name_;
  std::optional<LinearGenerator> linear_;
  std::optional<TriangularMap> triangular_;
};

/// theta = (f, P_z).
struct ModelParams {
  Generator generator;
  DistributionPtr prior;

  /// Round-trip inversion on n prior samples within tol; throws
  /// std::invalid_argument on dimension mismatch.
  bool validate(RngStream& rng, std::size_t n = 1000, double tol = 1e-6) const;
};

}  // namespace idlab
