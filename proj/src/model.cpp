#include "idlab/model.hpp"

#include <cmath>
#include <stdexcept>

#include "idlab/errors.hpp"

namespace idlab {

Generator::Generator(std::size_t latent_dim, std::size_t obs_dim, Fn forward, Fn inverse,
                     std::string name)
    : latent_dim_(latent_dim),
      obs_dim_(obs_dim),
      forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      name_(std::move(name)) {
  if (latent_dim_ == 0 || obs_dim_ < latent_dim_)
    throw std::invalid_argument("generator: need 0 < latent_dim <= obs_dim");
}

Generator Generator::identity(std::size_t dim) {
  return from_linear(LinearGenerator(MatrixXd::Identity(dim, dim)));
}

Generator Generator::from_linear(const LinearGenerator& g) {
  Generator out(
      g.latent_dim(), g.obs_dim(), [g](const VectorXd& z) { return g.forward(z); },
      [g](const VectorXd& x) { return g.inverse(x); }, "linear");
  out.linear_ = g;
  return out;
}

Generator Generator::from_triangular(const TriangularMap& map) {
  Generator out(
      map.dim(), map.dim(), [map](const VectorXd& z) { return map.forward(z); },
      [map](const VectorXd& x) { return map.inverse(x); }, map.kind_name());
  out.triangular_ = map;
  if (map.kind() == TriangularMap::Kind::Affine)
    out.linear_ = LinearGenerator(map.matrix(), map.offset());
  return out;
}

Generator Generator::from_automorphism(const Automorphism& a) {
  if (a.matrix()) return from_linear(LinearGenerator(*a.matrix(), *a.offset()));
  return Generator(
      a.dim(), a.dim(), [a](const VectorXd& z) { return a.forward(z); },
      [a](const VectorXd& x) { return a.inverse(x); }, a.name());
}

Generator Generator::coordinate_embedding(std::size_t latent_dim, std::size_t obs_dim) {
  if (latent_dim == 0 || latent_dim > obs_dim)
    throw std::invalid_argument("embedding: need 0 < latent_dim <= obs_dim");
  MatrixXd f = MatrixXd::Zero(obs_dim, latent_dim);
  f.topRows(latent_dim).setIdentity();
  auto g = from_linear(LinearGenerator(f));
  g.name_ = "embedding";
  return g;
}

VectorXd Generator::forward(const VectorXd& z) const {
  if (static_cast<std::size_t>(z.size()) != latent_dim_)
    throw DimensionMismatch("generator: latent has wrong dimension");
  return forward_(z);
}

VectorXd Generator::inverse(const VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != obs_dim_)
    throw DimensionMismatch("generator: observation has wrong dimension");
  return inverse_(x);
}

MatrixXd Generator::forward_rows(const MatrixXd& z) const {
  MatrixXd out(z.rows(), static_cast<Eigen::Index>(obs_dim_));
  for (Eigen::Index r = 0; r < z.rows(); ++r) out.row(r) = forward(z.row(r).transpose()).transpose();
  return out;
}

MatrixXd Generator::inverse_rows(const MatrixXd& x) const {
  MatrixXd out(x.rows(), static_cast<Eigen::Index>(latent_dim_));
  for (Eigen::Index r = 0; r < x.rows(); ++r) out.row(r) = inverse(x.row(r).transpose()).transpose();
  return out;
}

Generator Generator::after(const Automorphism& a) const {
  if (a.dim() != latent_dim_) throw DimensionMismatch("generator: automorphism dimension differs");
  if (linear_ && a.matrix()) {
    const auto& g = *linear_;
    auto out = from_linear(LinearGenerator(g.loading() * *a.matrix(),
                                           g.offset() + g.loading() * *a.offset()));
    out.name_ = name_ + "*" + a.name();
    return out;
  }
  const Fn f = forward_, fi = inverse_;
  return Generator(
      latent_dim_, obs_dim_, [f, a](const VectorXd& z) { return f(a.forward(z)); },
      [fi, a](const VectorXd& x) { return a.inverse(fi(x)); }, name_ + "*" + a.name());
}

double Generator::round_trip_error(const MatrixXd& z) const {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const VectorXd zr = z.row(r).transpose();
    const double e = (inverse(forward(zr)) - zr).lpNorm<Eigen::Infinity>();
    worst = std::isfinite(e) ? std::max(worst, e) : INFINITY;
  }
  return worst;
}

bool ModelParams::validate(RngStream& rng, std::size_t n, double tol) const {
  if (!prior) throw std::invalid_argument("model: missing prior");
  if (prior->dim() != generator.latent_dim())
    throw std::invalid_argument("model: prior and generator latent dims differ");
  return generator.round_trip_error(sample(*prior, rng, n)) <= tol;
}

}  // namespace idlab
