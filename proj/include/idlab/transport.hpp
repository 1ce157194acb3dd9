#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "idlab/automorphism.hpp"
#include "idlab/measures.hpp"

namespace idlab {

/// Default finite-difference step (central differences).
inline constexpr double kFdStep = 1e-5;
/// Default CDF-scale tolerance of quantile inversions inside KR maps.
inline constexpr double kKrTol = 1e-12;

namespace detail {
class MapImpl;
}

/// Triangular monotone increasing map on R^d: component m depends on
/// coordinates 0..m and is strictly increasing in coordinate m.
///
/// Value type over an immutable shared representation. Every representation
/// evaluates prefixes: the image of (x_0..x_{k-1}) needs only those inputs,
/// which is what makes components, inverses and compositions cheap.
class TriangularMap {
 public:
  enum class Kind { Affine, CdfChain, Composed, Explicit };

  /// One component or inverse component: (prefix, value) -> value.
  using ComponentFn = std::function<double(std::span<const double>, double)>;

  static TriangularMap identity(std::size_t dim);
  /// x -> lower * x + offset; `lower` must be lower triangular with positive diagonal.
  static TriangularMap affine(const MatrixXd& lower, const VectorXd& offset);
  /// K_m(x) = F_target^{-1}( F_source(x_m | x_<m) | K_<m(x) ).
  static TriangularMap cdf_chain(DistributionPtr source, DistributionPtr target,
                                 double tol = kKrTol);
  /// Applies maps[0] first, then maps[1], ...
  static TriangularMap composed(std::vector<TriangularMap> maps);
  /// Closed-form map. inverse[m](x_<m, y_m) must solve forward[m](x_<m, x_m) = y_m,
  /// where the prefix holds already-recovered source coordinates.
  static TriangularMap explicit_map(std::string name, std::vector<ComponentFn> forward,
                                    std::vector<ComponentFn> inverse);

  std::size_t dim() const;
  Kind kind() const;
  std::string kind_name() const;

  VectorXd forward(const VectorXd& z) const;
  VectorXd inverse(const VectorXd& x) const;
  VectorXd operator()(const VectorXd& z) const { return forward(z); }
  /// Image of a length-k prefix under the first k components.
  VectorXd forward_prefix(const VectorXd& x) const;
  VectorXd inverse_prefix(const VectorXd& y) const;
  /// component_m(prefix, x_m)
  double component(std::size_t m, const VectorXd& prefix, double x_m) const;

  MatrixXd forward_rows(const MatrixXd& z) const;
  MatrixXd inverse_rows(const MatrixXd& x) const;

  /// Affine only: the lower-triangular matrix and offset.
  const MatrixXd& matrix() const;
  const VectorXd& offset() const;
  /// Explicit only: registry name.
  const std::string& name() const;
  /// CdfChain only.
  const DistributionPtr& source() const;
  const DistributionPtr& target() const;
  /// Composed only.
  const std::vector<TriangularMap>& parts() const;

  Automorphism as_automorphism() const;

  Json to_json() const;

 private:
  friend TriangularMap invert(const TriangularMap& map);
  explicit TriangularMap(std::shared_ptr<const detail::MapImpl> impl);
  std::shared_ptr<const detail::MapImpl> impl_;
};

/// Explicit maps reconstructible by name. Known names: "cubic" (z_i^3 on
/// every coordinate), "cubic_shear" (z1^3, z2 + z1), "sinh_shear"
/// (sinh z1, exp(z1/4) z2 + z1). Throws ConfigError for unknown names.
TriangularMap explicit_map_by_name(const std::string& name, std::size_t dim);
TriangularMap triangular_map_from_json(const Json& spec);

enum class KrRoute {
  Auto,      // Affine closed form for Gaussian pairs, CdfChain otherwise
  CdfChain,  // always the conditional-CDF recursion
};

TriangularMap kr_transport(const DistributionPtr& source, const DistributionPtr& target,
                           double tol = kKrTol, KrRoute route = KrRoute::Auto);

/// outer after inner.
TriangularMap compose(const TriangularMap& outer, const TriangularMap& inner);
TriangularMap invert(const TriangularMap& map);

/// Sum over m of log d component_m / d x_m at z. Exact for Affine maps,
/// central differences with `step` otherwise.
double log_det_jacobian(const TriangularMap& map, const VectorXd& z, double step = kFdStep);

struct CheckReport {
  std::size_t n = 0;
  double alpha = 0.01;
  double alpha_per_coordinate = 0.01;  // Bonferroni
  std::vector<double> ks_statistics;
  std::vector<double> p_values;
  double critical_value = 0.0;
  bool pass = false;

  double max_statistic() const;
  Json to_json() const;
};

/// Goodness of fit of map_# source against target. Mapped samples are sent
/// through the Rosenblatt transform of the target, and each coordinate is
/// KS-tested against U(0,1) at alpha / d.
CheckReport pushforward_check(const Automorphism& map, const Distribution& source,
                              const Distribution& target, std::size_t n, RngStream& rng,
                              double alpha = 0.01);
CheckReport pushforward_check(const TriangularMap& map, const Distribution& source,
                              const Distribution& target, std::size_t n, RngStream& rng,
                              double alpha = 0.01);

struct StructureReport {
  double max_cross_partial = 0.0;
  std::size_t worst_output = 0;
  std::size_t worst_input = 0;
  bool pass = false;
  Json to_json() const;
};

/// Max |d map_m / d z_j| over j != m and the probes, by central differences.
StructureReport component_wise_check(const Automorphism& map, const MatrixXd& probe_points,
                                     double step = kFdStep, double tol = 1e-6);
/// Same, restricted to the entries above the diagonal (j > m).
StructureReport triangular_check(const Automorphism& map, const MatrixXd& probe_points,
                                 double step = kFdStep, double tol = 1e-6);

/// Strict monotonicity of every component on random (prefix, x, x') triples.
bool check_monotone(const TriangularMap& map, RngStream& rng, std::size_t trials = 1000,
                    double spread = 3.0);

}  // namespace idlab
