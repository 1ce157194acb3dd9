#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "idlab/automorphism.hpp"
#include "idlab/model.hpp"
#include "idlab/transport.hpp"

namespace idlab {

struct StructureFlags {
  bool is_identity_ae = false;
  bool is_component_wise = false;
  bool is_triangular = false;
  bool is_affine = false;
};

struct FixedCoordReport {
  std::vector<std::size_t> coords;
  std::vector<double> deviations;
  bool pass = false;
  Json to_json() const;
};

struct IndeterminacyReport {
  double identity_sup_dev = 0.0;
  double identity_rms_dev = 0.0;
  double identity_tol = 0.0;
  std::size_t n_probes = 0;
  bool pushforward_pass = false;
  std::optional<CheckReport> forward_check;   // A_# P_a against P_b
  std::optional<CheckReport> backward_check;  // A^{-1}_# P_b against P_a
  std::optional<double> kernel_residual;
  std::optional<FixedCoordReport> fixed_coords;
  std::optional<double> affine_residual;
  std::optional<StructureReport> component_wise;
  std::optional<StructureReport> triangular;
  StructureFlags structure;

  Json to_json() const;
};

/// Axis-aligned box, used to restrict identity checks to a latent region.
struct Box {
  VectorXd lo;
  VectorXd hi;
  bool contains(const VectorXd& z) const;
};

/// A = f_b^{-1} o f_a with inverse f_a^{-1} o f_b. Range compatibility is
/// checked by round-tripping f_a outputs through f_b^{-1} then f_b on fixed
/// probe points; throws RangeMismatch beyond 1e-6 (relative to |f_a(z)| when
/// that exceeds one).
Automorphism generator_transform(const Generator& fa, const Generator& fb);

/// Samples z ~ reference (restricted to `region` when given, whose corners
/// are then added as probes) and measures |A(z) - z|_inf. Passes iff the
/// sup is below tol.
std::pair<bool, IndeterminacyReport> is_identity_ae(const Automorphism& a,
                                                    const Distribution& reference, std::size_t n,
                                                    double tol, RngStream& rng,
                                                    const std::optional<Box>& region = std::nullopt);

/// max over probes of |P_row(M) (T(z) - T(A(z)))|_2.
double kernel_residual(const std::function<VectorXd(const VectorXd&)>& suff_stat,
                       const Automorphism& a, const MatrixXd& contrasts, const MatrixXd& probes);

FixedCoordReport fixed_coordinate_check(const Automorphism& a, const std::vector<std::size_t>& d_star,
                                        const MatrixXd& probes, double tol);

struct AuditOptions {
  /// Level of the combined pushforward verdict; each direction gets alpha / 2.
  double alpha = 0.01;
  double identity_tol = 1e-6;
  std::size_t structure_probes = 50;
  double structure_tol = 1e-6;
  /// Sample size of the identity check; 0 means the audit's n.
  std::size_t identity_n = 0;
};

/// Pushforward check in both directions, identity check against P_a and
/// structure detection (affine, triangular, component-wise).
IndeterminacyReport indeterminacy_audit(const ModelParams& theta_a, const ModelParams& theta_b,
                                        std::size_t n, RngStream& rng,
                                        const AuditOptions& opts = {});

/// Same audit on an explicit candidate transform between two priors.
IndeterminacyReport audit_transform(const Automorphism& a, const DistributionPtr& prior_a,
                                    const DistributionPtr& prior_b, std::size_t n, RngStream& rng,
                                    const AuditOptions& opts = {});

/// A theta = (f o A^{-1}, A_# P_z).
ModelParams act_on_params(const Automorphism& a, const ModelParams& theta);

/// Fixed standard-normal probe points for structure checks.
MatrixXd default_probes(std::size_t dim, std::size_t count, std::uint64_t seed = 0x51ed);

}  // namespace idlab
