#pragma once

#include <span>

#include <Eigen/Dense>

#include "idlab/rng.hpp"

namespace testgen {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline VectorXd normal_vector(Eigen::Index d, idlab::RngStream& rng, double scale = 1.0) {
  VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = scale * rng.normal();
  return v;
}

inline MatrixXd normal_matrix(Eigen::Index r, Eigen::Index c, idlab::RngStream& rng) {
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

inline MatrixXd spd(Eigen::Index d, idlab::RngStream& rng) {
  const MatrixXd a = normal_matrix(d, d, rng);
  MatrixXd s = a * a.transpose() / static_cast<double>(d) + 0.5 * MatrixXd::Identity(d, d);
  return 0.5 * (s + s.transpose());
}

inline MatrixXd lower_positive(Eigen::Index d, idlab::RngStream& rng) {
  MatrixXd l = MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) l(i, j) = 0.5 * rng.normal();
    l(i, i) = 0.5 + rng.uniform();
  }
  return l;
}

inline MatrixXd well_conditioned(Eigen::Index d, idlab::RngStream& rng) {
  return normal_matrix(d, d, rng) + 2.5 * MatrixXd::Identity(d, d);
}

inline Eigen::Index dim_in(idlab::RngStream& rng, int lo, int hi) {
  return lo + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

template <std::size_t N>
MatrixXd rowmajor(const double (&v)[N], Eigen::Index rows, Eigen::Index cols) {
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v[i * cols + j];
  return m;
}

template <std::size_t N>
VectorXd vec(const double (&v)[N]) {
  VectorXd out(static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

}  // namespace testgen
