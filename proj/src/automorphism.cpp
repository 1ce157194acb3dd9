#include "idlab/automorphism.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "idlab/errors.hpp"

namespace idlab {

Automorphism::Automorphism(std::size_t dim, Fn forward, Fn inverse, StructureTags tags,
                           std::string name)
    : dim_(dim),
      forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      tags_(tags),
      name_(std::move(name)) {
  if (dim_ == 0) throw std::invalid_argument("Automorphism: dim must be positive");
}

Automorphism Automorphism::identity(std::size_t dim) {
  return affine(MatrixXd::Identity(dim, dim), VectorXd::Zero(dim), "identity");
}

Automorphism Automorphism::affine(const MatrixXd& matrix, const VectorXd& offset,
                                  std::string name) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != offset.size())
    throw DimensionMismatch("affine automorphism needs a square matrix and matching offset");
  Eigen::FullPivLU<MatrixXd> lu(matrix);
  if (!lu.isInvertible()) throw SingularMatrix("affine automorphism matrix is singular");
  const MatrixXd inv = lu.inverse();
  StructureTags tags;
  tags.linear = true;
  tags.triangular = num::is_lower_triangular(matrix);
  // component-wise in the strict sense of a diagonal matrix
  tags.component_wise = matrix.isDiagonal(0.0);
  Automorphism a(
      static_cast<std::size_t>(matrix.rows()),
      [matrix, offset](const VectorXd& z) -> VectorXd { return matrix * z + offset; },
      [inv, offset](const VectorXd& x) -> VectorXd { return inv * (x - offset); }, tags,
      std::move(name));
  a.matrix_ = matrix;
  a.offset_ = offset;
  return a;
}

Automorphism Automorphism::linear(const MatrixXd& matrix, std::string name) {
  return affine(matrix, VectorXd::Zero(matrix.rows()), std::move(name));
}

Automorphism Automorphism::translation(const VectorXd& shift) {
  const auto d = shift.size();
  auto a = affine(MatrixXd::Identity(d, d), shift, "translation");
  a.tags_.component_wise = true;
  return a;
}

Automorphism Automorphism::plane_rotation(std::size_t dim, std::size_t i, std::size_t j,
                                          double angle) {
  if (i >= dim || j >= dim || i == j)
    throw std::invalid_argument("plane_rotation: bad coordinate pair");
  MatrixXd r = MatrixXd::Identity(dim, dim);
  const double c = std::cos(angle), s = std::sin(angle);
  r(i, i) = c;
  r(i, j) = -s;
  r(j, i) = s;
  r(j, j) = c;
  return linear(r, "rotation");
}

Automorphism Automorphism::coordinate_flip(std::size_t dim, std::size_t coord) {
  if (coord >= dim) throw std::invalid_argument("coordinate_flip: coordinate out of range");
  MatrixXd r = MatrixXd::Identity(dim, dim);
  r(coord, coord) = -1.0;
  return linear(r, "coordinate_flip");
}

Automorphism Automorphism::component_wise(std::size_t dim,
                                          std::function<double(std::size_t, double)> fwd,
                                          std::function<double(std::size_t, double)> inv,
                                          std::string name) {
  StructureTags tags;
  tags.component_wise = true;
  tags.triangular = true;
  return Automorphism(
      dim,
      [fwd](const VectorXd& z) -> VectorXd {
        VectorXd y(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) y(i) = fwd(static_cast<std::size_t>(i), z(i));
        return y;
      },
      [inv](const VectorXd& x) -> VectorXd {
        VectorXd z(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) z(i) = inv(static_cast<std::size_t>(i), x(i));
        return z;
      },
      tags, std::move(name));
}

VectorXd Automorphism::forward(const VectorXd& z) const {
  if (static_cast<std::size_t>(z.size()) != dim_)
    throw DimensionMismatch("automorphism input has wrong dimension");
  return forward_(z);
}

VectorXd Automorphism::inverse(const VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_)
    throw DimensionMismatch("automorphism input has wrong dimension");
  return inverse_(x);
}

MatrixXd Automorphism::forward_rows(const MatrixXd& z) const {
  MatrixXd out(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) out.row(r) = forward(z.row(r).transpose()).transpose();
  return out;
}

MatrixXd Automorphism::inverse_rows(const MatrixXd& x) const {
  MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) out.row(r) = inverse(x.row(r).transpose()).transpose();
  return out;
}

Automorphism Automorphism::inverted() const {
  if (matrix_) {
    const MatrixXd inv = matrix_->inverse();
    auto a = affine(inv, -inv * *offset_, name_ + "^-1");
    a.tags_.component_wise = tags_.component_wise;
    return a;
  }
  return Automorphism(dim_, inverse_, forward_, tags_, name_ + "^-1");
}

Automorphism Automorphism::after(const Automorphism& inner) const {
  if (inner.dim_ != dim_) throw DimensionMismatch("composing automorphisms of different dims");
  if (matrix_ && inner.matrix_) {
    auto a = affine(*matrix_ * *inner.matrix_, *matrix_ * *inner.offset_ + *offset_,
                    name_ + "*" + inner.name_);
    a.tags_.component_wise = tags_.component_wise && inner.tags_.component_wise;
    return a;
  }
  StructureTags tags;
  tags.triangular = tags_.triangular && inner.tags_.triangular;
  tags.component_wise = tags_.component_wise && inner.tags_.component_wise;
  auto f1 = forward_, f2 = inner.forward_;
  auto i1 = inverse_, i2 = inner.inverse_;
  return Automorphism(
      dim_, [f1, f2](const VectorXd& z) -> VectorXd { return f1(f2(z)); },
      [i1, i2](const VectorXd& x) -> VectorXd { return i2(i1(x)); }, tags,
      name_ + "*" + inner.name_);
}

}  // namespace idlab
