#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "idlab/numerics.hpp"

namespace idlab {

/// Structure tags an automorphism may carry. Tags are declarations made by
/// the constructor; the indeterminacy module verifies them numerically.
struct StructureTags {
  bool triangular = false;
  bool linear = false;  // affine: x -> matrix * x + offset
  bool component_wise = false;
};

/// Invertible map of R^d onto itself.
class Automorphism {
 public:
  using Fn = std::function<VectorXd(const VectorXd&)>;

  Automorphism(std::size_t dim, Fn forward, Fn inverse, StructureTags tags = {},
               std::string name = "explicit");

  static Automorphism identity(std::size_t dim);
  /// x -> matrix * x + offset; matrix must be square and invertible.
  static Automorphism affine(const MatrixXd& matrix, const VectorXd& offset,
                             std::string name = "affine");
  static Automorphism linear(const MatrixXd& matrix, std::string name = "linear");
  static Automorphism translation(const VectorXd& shift);
  /// Rotation by `angle` radians in the (i, j) coordinate plane of R^dim.
  static Automorphism plane_rotation(std::size_t dim, std::size_t i, std::size_t j, double angle);
  /// Negates one coordinate.
  static Automorphism coordinate_flip(std::size_t dim, std::size_t coord);
  /// Applies a strictly monotone scalar map to each coordinate.
  static Automorphism component_wise(std::size_t dim, std::function<double(std::size_t, double)> fwd,
                                     std::function<double(std::size_t, double)> inv,
                                     std::string name = "component_wise");

  std::size_t dim() const { return dim_; }
  const StructureTags& tags() const { return tags_; }
  const std::string& name() const { return name_; }

  VectorXd forward(const VectorXd& z) const;
  VectorXd inverse(const VectorXd& x) const;
  VectorXd operator()(const VectorXd& z) const { return forward(z); }

  /// Row-wise application to an n x d matrix of points.
  MatrixXd forward_rows(const MatrixXd& z) const;
  MatrixXd inverse_rows(const MatrixXd& x) const;

  /// Present only for affine automorphisms.
  const std::optional<MatrixXd>& matrix() const { return matrix_; }
  const std::optional<VectorXd>& offset() const { return offset_; }

  Automorphism inverted() const;
  /// this after inner: z -> this(inner(z)).
  Automorphism after(const Automorphism& inner) const;

 private:
  std::size_t dim_;
  Fn forward_;
  Fn inverse_;
  StructureTags tags_;
  std::string name_;
  std::optional<MatrixXd> matrix_;
  std::optional<VectorXd> offset_;
};

}  // namespace idlab
