#include "idlab/indeterminacy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "idlab/errors.hpp"

namespace idlab {

Json FixedCoordReport::to_json() const {
  return Json{{"coords", coords}, {"deviations", deviations}, {"pass", pass}};
}

Json IndeterminacyReport::to_json() const {
  Json j{{"identity_sup_dev", identity_sup_dev},
         {"identity_rms_dev", identity_rms_dev},
         {"identity_tol", identity_tol},
         {"n_probes", n_probes},
         {"pushforward_pass", pushforward_pass},
         {"structure",
          {{"is_identity_ae", structure.is_identity_ae},
           {"is_component_wise", structure.is_component_wise},
           {"is_triangular", structure.is_triangular},
           {"is_affine", structure.is_affine}}}};
  j["forward_check"] = forward_check ? forward_check->to_json() : Json(nullptr);
  j["backward_check"] = backward_check ? backward_check->to_json() : Json(nullptr);
  j["kernel_residual"] = kernel_residual ? Json(*kernel_residual) : Json(nullptr);
  j["fixed_coord_dev"] = fixed_coords ? fixed_coords->to_json() : Json(nullptr);
  j["affine_residual"] = affine_residual ? Json(*affine_residual) : Json(nullptr);
  j["component_wise_check"] = component_wise ? component_wise->to_json() : Json(nullptr);
  j["triangular_check"] = triangular ? triangular->to_json() : Json(nullptr);
  return j;
}

bool Box::contains(const VectorXd& z) const {
  return (z.array() >= lo.array()).all() && (z.array() <= hi.array()).all();
}

MatrixXd default_probes(std::size_t dim, std::size_t count, std::uint64_t seed) {
  RngStream rng(seed, 0);
  MatrixXd p(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j) p(i, j) = rng.normal();
  if (count > 0) p.row(0).setZero();
  return p;
}

Automorphism generator_transform(const Generator& fa, const Generator& fb) {
  if (fa.latent_dim() != fb.latent_dim() || fa.obs_dim() != fb.obs_dim())
    throw DimensionMismatch("generator_transform: generators have different shapes");
  const MatrixXd probes = default_probes(fa.latent_dim(), 64);
  for (Eigen::Index r = 0; r < probes.rows(); ++r) {
    const VectorXd x = fa.forward(probes.row(r).transpose());
    const double err = (fb.forward(fb.inverse(x)) - x).norm();
    if (!(err <= 1e-6 * std::max(1.0, x.norm())))
      throw RangeMismatch("f_b^{-1} does not invert f_a outputs (round-trip error " +
                          std::to_string(err) + ")");
  }
  if (fa.linear() && fb.linear()) return linear_generator_automorphism(*fa.linear(), *fb.linear());
  if (fa.triangular() && fb.triangular())
    return compose(invert(*fb.triangular()), *fa.triangular()).as_automorphism();
  StructureTags tags;
  return Automorphism(
      fa.latent_dim(), [fa, fb](const VectorXd& z) { return fb.inverse(fa.forward(z)); },
      [fa, fb](const VectorXd& z) { return fa.inverse(fb.forward(z)); }, tags,
      "transform(" + fa.name() + "," + fb.name() + ")");
}

namespace {

std::vector<VectorXd> box_corners(const Box& box) {
  const auto d = static_cast<std::size_t>(box.lo.size());
  if (d > 12) return {box.lo, box.hi};
  std::vector<VectorXd> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    VectorXd c(box.lo.size());
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      c(ii) = (mask >> i) & 1 ? box.hi(ii) : box.lo(ii);
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::pair<bool, IndeterminacyReport> is_identity_ae(const Automorphism& a,
                                                    const Distribution& reference, std::size_t n,
                                                    double tol, RngStream& rng,
                                                    const std::optional<Box>& region) {
  if (n < 1000) throw std::invalid_argument("is_identity_ae: need at least 1000 samples");
  if (a.dim() != reference.dim()) throw DimensionMismatch("is_identity_ae: dimensions differ");
  std::vector<VectorXd> points;
  points.reserve(n);
  if (region) {
    if (static_cast<std::size_t>(region->lo.size()) != a.dim() ||
        static_cast<std::size_t>(region->hi.size()) != a.dim())
      throw DimensionMismatch("is_identity_ae: region has wrong dimension");
    std::size_t attempts = 0;
    while (points.size() < n) {
      const MatrixXd batch = sample(reference, rng, n);
      for (Eigen::Index r = 0; r < batch.rows() && points.size() < n; ++r) {
        const VectorXd z = batch.row(r).transpose();
        if (region->contains(z)) points.push_back(z);
      }
      if (++attempts > 1000) throw std::invalid_argument("is_identity_ae: region has no mass");
    }
    for (auto& c : box_corners(*region)) points.push_back(std::move(c));
  } else {
    const MatrixXd batch = sample(reference, rng, n);
    for (Eigen::Index r = 0; r < batch.rows(); ++r) points.push_back(batch.row(r).transpose());
  }
  IndeterminacyReport rep;
  rep.identity_tol = tol;
  rep.n_probes = points.size();
  double sum_sq = 0.0;
  for (const auto& z : points) {
    double dev = (a.forward(z) - z).lpNorm<Eigen::Infinity>();
    if (!std::isfinite(dev)) dev = INFINITY;
    rep.identity_sup_dev = std::max(rep.identity_sup_dev, dev);
    sum_sq += dev * dev;
  }
  rep.identity_rms_dev = std::min(std::sqrt(sum_sq / static_cast<double>(points.size())),
                                  rep.identity_sup_dev);
  const bool pass = rep.identity_sup_dev < tol;
  if (pass) rep.structure = {true, true, true, true};
  return {pass, rep};
}

double kernel_residual(const std::function<VectorXd(const VectorXd&)>& suff_stat,
                       const Automorphism& a, const MatrixXd& contrasts, const MatrixXd& probes) {
  if (contrasts.rows() == 0) return 0.0;
  const MatrixXd proj = num::row_space_projector(contrasts);
  double worst = 0.0;
  for (Eigen::Index r = 0; r < probes.rows(); ++r) {
    const VectorXd z = probes.row(r).transpose();
    const VectorXd diff = suff_stat(z) - suff_stat(a.forward(z));
    if (diff.size() != contrasts.cols())
      throw DimensionMismatch("kernel_residual: statistic dimension differs from M");
    worst = std::max(worst, (proj * diff).norm());
  }
  return worst;
}

FixedCoordReport fixed_coordinate_check(const Automorphism& a, const std::vector<std::size_t>& d_star,
                                        const MatrixXd& probes, double tol) {
  if (d_star.empty()) throw std::invalid_argument("fixed_coordinate_check: empty coordinate set");
  for (auto i : d_star)
    if (i >= a.dim()) throw std::invalid_argument("fixed_coordinate_check: coordinate out of range");
  FixedCoordReport rep;
  rep.coords = d_star;
  rep.deviations.assign(d_star.size(), 0.0);
  for (Eigen::Index r = 0; r < probes.rows(); ++r) {
    const VectorXd z = probes.row(r).transpose();
    const VectorXd y = a.forward(z);
    for (std::size_t k = 0; k < d_star.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(d_star[k]);
      rep.deviations[k] = std::max(rep.deviations[k], std::abs(y(i) - z(i)));
    }
  }
  rep.pass = std::all_of(rep.deviations.begin(), rep.deviations.end(),
                         [tol](double v) { return v < tol; });
  return rep;
}

namespace {

// Max residual of the least-squares affine fit of A on the probes.
double affine_fit_residual(const Automorphism& a, const MatrixXd& probes) {
  const auto d = probes.cols();
  MatrixXd design(probes.rows(), d + 1);
  design.leftCols(d) = probes;
  design.col(d).setOnes();
  const MatrixXd image = a.forward_rows(probes);
  const MatrixXd coef = design.colPivHouseholderQr().solve(image);
  return (design * coef - image).lpNorm<Eigen::Infinity>();
}

}  // namespace

IndeterminacyReport audit_transform(const Automorphism& a, const DistributionPtr& prior_a,
                                    const DistributionPtr& prior_b, std::size_t n, RngStream& rng,
                                    const AuditOptions& opts) {
  RngStream fwd_rng = rng.child(1), bwd_rng = rng.child(2), id_rng = rng.child(3);
  // both directions share the level alpha
  const double half = 0.5 * opts.alpha;
  const CheckReport fwd = pushforward_check(a, *prior_a, *prior_b, n, fwd_rng, half);
  const CheckReport bwd = pushforward_check(a.inverted(), *prior_b, *prior_a, n, bwd_rng, half);
  auto [identity, rep] =
      is_identity_ae(a, *prior_a, opts.identity_n ? opts.identity_n : n, opts.identity_tol, id_rng);
  rep.forward_check = fwd;
  rep.backward_check = bwd;
  rep.pushforward_pass = fwd.pass && bwd.pass;

  const MatrixXd probes = default_probes(a.dim(), opts.structure_probes);
  const double scale = std::max(1.0, a.forward_rows(probes).lpNorm<Eigen::Infinity>());
  rep.affine_residual = affine_fit_residual(a, probes);
  rep.triangular = triangular_check(a, probes, kFdStep, opts.structure_tol * scale);
  rep.component_wise = component_wise_check(a, probes, kFdStep, opts.structure_tol * scale);
  rep.structure.is_identity_ae = identity;
  rep.structure.is_affine = identity || *rep.affine_residual <= 1e-9 * scale;
  rep.structure.is_component_wise = identity || rep.component_wise->pass;
  rep.structure.is_triangular = rep.structure.is_component_wise || rep.triangular->pass;
  return rep;
}

IndeterminacyReport indeterminacy_audit(const ModelParams& theta_a, const ModelParams& theta_b,
                                        std::size_t n, RngStream& rng, const AuditOptions& opts) {
  const Automorphism a = generator_transform(theta_a.generator, theta_b.generator);
  return audit_transform(a, theta_a.prior, theta_b.prior, n, rng, opts);
}

ModelParams act_on_params(const Automorphism& a, const ModelParams& theta) {
  if (a.dim() != theta.generator.latent_dim())
    throw DimensionMismatch("act_on_params: automorphism dimension differs from latent dim");
  return ModelParams{theta.generator.after(a.inverted()), pushforward(theta.prior, a)};
}

}  // namespace idlab
