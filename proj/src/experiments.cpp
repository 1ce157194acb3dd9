#include "idlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

#include "idlab/envs.hpp"
#include "idlab/errors.hpp"
#include "idlab/indeterminacy.hpp"
#include "idlab/linear.hpp"
#include "idlab/measures.hpp"
#include "idlab/tasks.hpp"
#include "idlab/transport.hpp"

namespace idlab {

Json Claim::to_json() const {
  return Json{{"name", name}, {"pass", pass}, {"value", value}, {"threshold", threshold}};
}

namespace {

// --- parameter access -------------------------------------------------------------

double pnum(const Json& p, const char* key) { return p.at(key).get<double>(); }

std::size_t pcount(const Json& p, const char* key) {
  const auto& v = p.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(std::string("parameter '") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

double pos_num(const Json& p, const char* key) {
  const double v = pnum(p, key);
  if (!(v > 0.0)) throw ConfigError(std::string("parameter '") + key + "' must be positive");
  return v;
}

MatrixXd pmat(const Json& p, const char* key) { return matrix_from_json(p.at(key)); }
VectorXd pvec(const Json& p, const char* key) { return vector_from_json(p.at(key)); }

double sup_rows(const MatrixXd& a, const MatrixXd& b) {
  return a.size() == 0 ? 0.0 : (a - b).lpNorm<Eigen::Infinity>();
}

MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, RngStream& rng) {
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

MatrixXd random_spd(Eigen::Index d, RngStream& rng) {
  const MatrixXd a = random_matrix(d, d, rng);
  MatrixXd s = a * a.transpose() / static_cast<double>(d) + 0.5 * MatrixXd::Identity(d, d);
  return 0.5 * (s + s.transpose());
}

MatrixXd random_lower_positive(Eigen::Index d, RngStream& rng) {
  MatrixXd l = MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) l(i, j) = 0.5 * rng.normal();
    l(i, i) = 0.5 + rng.uniform();
  }
  return l;
}

DistributionPtr laplace_product(std::size_t d, double scale) {
  std::vector<DistributionPtr> ms;
  for (std::size_t i = 0; i < d; ++i) ms.push_back(std::make_shared<LaplaceDistribution>(0.0, scale));
  return std::make_shared<ProductDistribution>(ms);
}

DistributionPtr two_component_mixture(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  MatrixXd cov2 = 0.5 * MatrixXd::Identity(n, n) + 0.2 * MatrixXd::Ones(n, n);
  std::vector<GaussianDistribution> comps{
      GaussianDistribution(VectorXd::Constant(n, -1.5), MatrixXd::Identity(n, n)),
      GaussianDistribution(VectorXd::Constant(n, 1.5), cov2)};
  return std::make_shared<GaussianMixtureDistribution>(std::vector<double>{0.4, 0.6}, comps);
}

DistributionPtr named_prior(const std::string& name, std::size_t d) {
  if (name == "gaussian") return GaussianDistribution::standard(d);
  if (name == "laplace_product") return laplace_product(d, 1.0);
  if (name == "mixture") return two_component_mixture(d);
  throw ConfigError("unknown prior '" + name + "'");
}

Claim claim(std::string name, bool pass, Json value, Json threshold) {
  return Claim{std::move(name), pass, std::move(value), std::move(threshold)};
}

Box inter_decile_box(std::size_t d) {
  const double lo = num::normal_quantile(0.1), hi = num::normal_quantile(0.9);
  return Box{VectorXd::Constant(static_cast<Eigen::Index>(d), lo),
             VectorXd::Constant(static_cast<Eigen::Index>(d), hi)};
}

std::vector<VectorXd> triangle_means(double radius) {
  std::vector<VectorXd> out;
  for (int k = 0; k < 3; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 3.0;
    out.push_back((VectorXd(2) << radius * std::cos(t), radius * std::sin(t)).finished());
  }
  return out;
}

// --- kr-identity ----------------------------------------------------------------

SeedResult run_kr_identity(const Json& p, std::uint64_t seed) {
  SeedResult r;
  const std::size_t n = pcount(p, "n");
  const double tol = pos_num(p, "tol");
  double worst = 0.0, worst_cost = 0.0;
  Json cells = Json::array();
  std::uint64_t cell = 0;
  for (const auto& prior_name : p.at("priors")) {
    for (const auto& dj : p.at("dims")) {
      if (!dj.is_number_integer() || dj.get<long long>() < 1 || dj.get<long long>() > 8)
        throw ConfigError("dims must be integers in 1..8");
      const auto d = dj.get<std::size_t>();
      const DistributionPtr prior = named_prior(prior_name.get<std::string>(), d);
      RngStream rng(seed, cell++);
      const TriangularMap k = kr_transport(prior, prior);
      const MatrixXd z = sample(*prior, rng, n);
      const MatrixXd kz = k.forward_rows(z);
      const VectorXd dev = (kz - z).rowwise().lpNorm<Eigen::Infinity>();
      const double sup = dev.maxCoeff();
      const double rms = std::sqrt(dev.squaredNorm() / static_cast<double>(n));
      const double cost = (kz - z).squaredNorm() / z.squaredNorm();
      worst = std::max(worst, sup);
      worst_cost = std::max(worst_cost, cost);
      const bool pass = sup < tol && cost < 1e-10;
      r.rows.push_back({seed, prior_name, d, n, sup, rms, cost, pass});
      cells.push_back({{"prior", prior_name}, {"dim", d}, {"map_kind", k.kind_name()},
                       {"sup_dev", sup}, {"rms_dev", rms}, {"cost_ratio", cost}});
    }
  }
  r.report = {{"cells", cells}, {"sup_dev", worst}, {"cost_ratio", worst_cost}};
  r.claims.push_back(claim("identity_law", worst < tol, worst, tol));
  r.claims.push_back(claim("separating_cost", worst_cost < 1e-10, worst_cost, 1e-10));
  return r;
}

// --- kr-gaussian ----------------------------------------------------------------

SeedResult run_kr_gaussian(const Json& p, std::uint64_t seed) {
  SeedResult r;
  const std::size_t trials = pcount(p, "trials"), max_dim = pcount(p, "max_dim");
  const std::size_t n = pcount(p, "n"), check_n = pcount(p, "check_n");
  const double tol = pos_num(p, "tol");
  if (max_dim == 0) throw ConfigError("max_dim must be positive");
  double worst = 0.0;
  Json cells = Json::array();
  for (std::size_t t = 0; t < trials; ++t) {
    RngStream rng(seed, 100 + t);
    const auto d = static_cast<Eigen::Index>(1 + rng() % max_dim);
    auto src = std::make_shared<GaussianDistribution>(random_matrix(d, 1, rng).col(0), random_spd(d, rng));
    auto tgt = std::make_shared<GaussianDistribution>(random_matrix(d, 1, rng).col(0), random_spd(d, rng));
    const TriangularMap affine = kr_transport(src, tgt);
    const TriangularMap chain = kr_transport(src, tgt, kKrTol, KrRoute::CdfChain);
    const MatrixXd z = sample(*src, rng, n);
    const double sup = sup_rows(chain.forward_rows(z), affine.forward_rows(z));
    RngStream check_rng = rng.child(1);
    const CheckReport pf = pushforward_check(chain, *src, *tgt, check_n, check_rng);
    worst = std::max(worst, sup);
    r.rows.push_back({seed, t, d, sup, pf.pass, sup < tol});
    cells.push_back({{"trial", t}, {"dim", d}, {"sup_dev", sup}, {"pushforward", pf.to_json()}});
  }
  r.report = {{"trials", cells}, {"sup_dev", worst}};
  r.claims.push_back(claim("cholesky_agreement", worst < tol, worst, tol));
  return r;
}

// --- ica-comon ------------------------------------------------------------------

SeedResult run_ica_comon(const Json& p, std::uint64_t seed) {
  SeedResult r;
  const std::size_t probes_n = pcount(p, "probes"), n = pcount(p, "n");
  const double tol = pos_num(p, "tol");
  const DistributionPtr src = std::make_shared<ProductDistribution>(std::vector<DistributionPtr>{
      std::make_shared<LaplaceDistribution>(0.0, 1.0), std::make_shared<LogisticDistribution>(0.0, 1.0)});
  const DistributionPtr tgt = std::make_shared<ProductDistribution>(std::vector<DistributionPtr>{
      std::make_shared<LogisticDistribution>(0.5, 2.0), std::make_shared<LaplaceDistribution>(-1.0, 0.7)});
  const MatrixXd probes = 1.5 * default_probes(2, probes_n, seed);

  const Automorphism kr = kr_transport(src, tgt).as_automorphism();
  const StructureReport cw = component_wise_check(kr, probes, kFdStep, tol);
  r.rows.push_back({seed, "kr_product", cw.max_cross_partial, nullptr, nullptr, cw.pass});

  // linear ICA: generators related by a permutation times a scaling
  RngStream rng(seed, 1);
  MatrixXd ps(2, 2);
  ps << 0.0, 2.0, -0.5, 0.0;
  const LinearGenerator fa(random_matrix(2, 2, rng) + 2.0 * MatrixXd::Identity(2, 2));
  const LinearGenerator fb(fa.loading() * ps.inverse());
  const MatrixXd a = linear_generator_transform(fa, fb);
  const bool comon = comon_structure_check(a, 1e-8);
  const DistributionPtr prior_b = std::make_shared<ProductDistribution>(std::vector<DistributionPtr>{
      std::make_shared<LogisticDistribution>(0.0, 2.0), std::make_shared<LaplaceDistribution>(0.0, 0.5)});
  RngStream pf_rng = rng.child(1);
  const CheckReport pf = pushforward_check(Automorphism::linear(a), *src, *prior_b, n, pf_rng);
  r.rows.push_back({seed, "linear_permutation_scaling", nullptr, comon, pf.pass, comon && pf.pass});

  const Automorphism rot = Automorphism::plane_rotation(2, 0, 1, 0.5);
  const bool rot_comon = comon_structure_check(*rot.matrix(), 1e-8);
  const StructureReport rot_cw = component_wise_check(rot, probes, kFdStep, tol);
  r.rows.push_back({seed, "rotation_control", rot_cw.max_cross_partial, rot_comon, nullptr,
                    !rot_comon && !rot_cw.pass});

  r.report = {{"kr_component_wise", cw.to_json()},
              {"linear_transform", matrix_to_json(a)},
              {"linear_comon", comon},
              {"linear_pushforward", pf.to_json()},
              {"rotation_comon", rot_comon}};
  r.claims.push_back(claim("kr_component_wise", cw.pass, cw.max_cross_partial, tol));
  r.claims.push_back(claim("linear_ica_structure", comon && pf.pass, comon, true));
  r.claims.push_back(claim("rotation_rejected", !rot_comon && !rot_cw.pass, rot_comon, false));
  return r;
}

// --- fa-rotation ----------------------------------------------------------------

SeedResult run_fa_rotation(const Json& p, std::uint64_t seed) {
  SeedResult r;
  const VectorXd mu1 = pvec(p, "mu1"), mu2 = pvec(p, "mu2");
  const std::size_t dx = pcount(p, "obs_dim");
  const double tol = pos_num(p, "tol"), min_dist = pnum(p, "min_distance");
  if (dx < 2) throw ConfigError("obs_dim must be at least 2");
  MatrixXd f = MatrixXd::Zero(static_cast<Eigen::Index>(dx), 2);
  f.topRows(2).setIdentity();
  const LinearGenerator f1(f);
  const Counterexample ce = rotation_counterexample(mu1, mu2, f1);
  const double orth = (ce.rotation.transpose() * ce.rotation - MatrixXd::Identity(2, 2)).norm();
  const double axis = (ce.rotation * (mu2 - mu1) - (mu2 - mu1)).norm();
  const UniquenessReport two = solve_multi_env_linear(f1, EnvConstraintSystem({mu1, mu2}));
  const bool valid = ce.mean_residual_1 < tol && ce.mean_residual_2 < tol &&
                     ce.covariance_residual < tol && orth < tol && axis < tol &&
                     ce.loading_distance > min_dist;
  r.rows.push_back({seed, ce.mean_residual_1, ce.mean_residual_2, ce.covariance_residual,
                    ce.loading_distance, two.unique, valid && !two.unique});
  r.report = {{"counterexample", ce.to_json()},
              {"orthogonality_residual", orth},
              {"axis_residual", axis},
              {"two_env_uniqueness", two.to_json()},
              {"counterexample_valid", valid},
              {"loading_distance", ce.loading_distance}};
  r.claims.push_back(claim("counterexample_valid", valid, ce.loading_distance, min_dist));
  r.claims.push_back(claim("two_env_not_unique", !two.unique, two.contrast_rank, 2));
  return r;
}

// --- fa-three-env ---------------------------------------------------------------

SeedResult run_fa_three_env(const Json& p, std::uint64_t seed) {
  SeedResult r;
  std::vector<VectorXd> means;
  for (const auto& m : p.at("means")) means.push_back(vector_from_json(m));
  if (means.size() < 3) throw ConfigError("fa-three-env needs at least three means");
  const std::size_t dx = pcount(p, "obs_dim");
  const double tol = pos_num(p, "tol");
  RngStream rng(seed, 0);
  const auto dz = means.front().size();
  if (static_cast<Eigen::Index>(dx) < dz) throw ConfigError("obs_dim must be at least the latent dim");
  const LinearGenerator f1(random_matrix(static_cast<Eigen::Index>(dx), dz, rng),
                           random_matrix(static_cast<Eigen::Index>(dx), 1, rng).col(0));
  Json subsets = Json::array();
  bool all_unique_ok = false, fewer_ok = true;
  double full_distance = 0.0;
  for (std::size_t k = means.size(); k >= 1; --k) {
    const std::vector<VectorXd> subset(means.begin(), means.begin() + static_cast<long>(k));
    const UniquenessReport u = solve_multi_env_linear(f1, EnvConstraintSystem(subset));
    bool pass;
    if (k == means.size()) {
      full_distance = u.recovered_distance;
      all_unique_ok = u.unique && u.recovered_distance < tol;
      pass = all_unique_ok;
    } else {
      pass = u.contrast_rank == static_cast<std::size_t>(dz) ? u.unique : !u.unique;
      if (k < static_cast<std::size_t>(dz) + 1) fewer_ok = fewer_ok && !u.unique;
    }
    r.rows.push_back({seed, k, u.contrast_rank, u.unique, u.recovered_distance, pass});
    subsets.push_back(u.to_json());
  }
  r.report = {{"subsets", subsets}, {"recovered_distance", full_distance}};
  r.claims.push_back(claim("spanning_envs_unique", all_unique_ok, full_distance, tol));
  r.claims.push_back(claim("fewer_envs_not_unique", fewer_ok, fewer_ok, true));
  return r;
}

// --- expfam-kernel --------------------------------------------------------------

SeedResult run_expfam_kernel(const Json& p, std::uint64_t seed) {
  SeedResult r;
  std::vector<VectorXd> etas;
  for (const auto& m : p.at("means")) etas.push_back(vector_from_json(m));
  if (etas.empty()) throw ConfigError("expfam-kernel needs at least one mean");
  const auto d = etas.front().size();
  etas.insert(etas.begin(), VectorXd::Zero(d));  // base environment N(0, I)
  const std::size_t probes_n = pcount(p, "probes"), n = pcount(p, "n");
  const double tol = pos_num(p, "tol"), shift = pnum(p, "shift");
  const EnvironmentSet envs = EnvironmentSet::gaussian_means(etas);
  const MatrixXd eta = envs.eta_matrix();
  const MatrixXd m = eta.bottomRows(eta.rows() - 1).rowwise() - eta.row(0);
  std::vector<std::size_t> d_star;
  for (Eigen::Index i = 0; i < d; ++i)
    if ((m.col(i).array() != 0.0).any()) d_star.push_back(static_cast<std::size_t>(i));
  std::vector<std::size_t> free_coords;
  for (Eigen::Index i = 0; i < d; ++i)
    if (std::find(d_star.begin(), d_star.end(), static_cast<std::size_t>(i)) == d_star.end())
      free_coords.push_back(static_cast<std::size_t>(i));
  if (d_star.empty() || free_coords.empty())
    throw ConfigError("expfam-kernel needs both spanned and unspanned coordinates");
  const auto stat = envs.shared_stat().suff_stat;
  const MatrixXd probes = 2.0 * default_probes(static_cast<std::size_t>(d), probes_n, seed);

  const Automorphism flip = Automorphism::coordinate_flip(static_cast<std::size_t>(d), free_coords.front());
  VectorXd t = VectorXd::Zero(d);
  t(static_cast<Eigen::Index>(d_star.front())) = shift;
  const Automorphism shifted = Automorphism::translation(t);

  const double res_flip = kernel_residual(stat, flip, m, probes);
  const double res_shift = kernel_residual(stat, shifted, m, probes);
  const FixedCoordReport fix_flip = fixed_coordinate_check(flip, d_star, probes, 1e-12);
  const FixedCoordReport fix_shift = fixed_coordinate_check(shifted, d_star, probes, 1e-12);
  bool preserves = true;
  Json checks = Json::array();
  for (std::size_t e = 0; e < envs.size(); ++e) {
    RngStream rng(seed, 10 + e);
    const CheckReport c = pushforward_check(flip, *envs.priors()[e], *envs.priors()[e], n, rng);
    preserves = preserves && c.pass;
    checks.push_back(c.to_json());
  }
  r.rows.push_back({seed, "flip", res_flip, fix_flip.pass, preserves, res_flip < tol && fix_flip.pass});
  r.rows.push_back({seed, "translation", res_shift, fix_shift.pass, nullptr,
                    res_shift >= std::abs(shift) - tol && !fix_shift.pass});
  r.report = {{"contrasts", matrix_to_json(m)},
              {"d_star", d_star},
              {"flip_kernel_residual", res_flip},
              {"flip_fixed_coords", fix_flip.to_json()},
              {"translation_kernel_residual", res_shift},
              {"translation_fixed_coords", fix_shift.to_json()},
              {"flip_pushforward_checks", checks}};
  r.claims.push_back(claim("flip_in_kernel", res_flip < tol, res_flip, tol));
  r.claims.push_back(claim("flip_fixes_spanned_coords", fix_flip.pass, fix_flip.deviations, 1e-12));
  r.claims.push_back(claim("translation_detected", res_shift >= std::abs(shift) - tol, res_shift,
                           std::abs(shift) - tol));
  r.claims.push_back(claim("flip_preserves_priors", preserves, preserves, true));
  return r;
}

// --- strong-vae / ivae-affine shared pieces -------------------------------------

struct FrozenFit {
  LinearGenerator fa, fb;
  Dataset half_a, half_b;
};

FrozenFit frozen_fits(const Json& p, const EnvironmentSet& envs, std::uint64_t seed) {
  const std::size_t n = pcount(p, "n");
  const double noise = pnum(p, "noise_sd");
  const Generator truth = Generator::from_linear(LinearGenerator(pmat(p, "loading"), pvec(p, "offset")));
  RngStream rng(seed, 0);
  RngStream ra = rng.child(0), rb = rng.child(1);
  Dataset a = generate_environment_data(envs, truth, noise, n, ra);
  Dataset b = generate_environment_data(envs, truth, noise, n, rb);
  std::vector<VectorXd> etas;
  for (const auto& f : envs.expfam_priors()) etas.push_back(f->eta());
  auto fit = [&](const Dataset& d) {
    std::vector<VectorXd> xm;
    for (std::size_t e = 0; e < envs.size(); ++e) xm.push_back(d.x_of(e).colwise().mean().transpose());
    return fit_multi_env_affine(xm, etas);
  };
  return FrozenFit{fit(a), fit(b), std::move(a), std::move(b)};
}

SeedResult run_strong_vae(const Json& p, std::uint64_t seed) {
  SeedResult r;
  const std::size_t n = pcount(p, "n"), check_n = pcount(p, "check_n");
  const double tol = pos_num(p, "tol_factor") / std::sqrt(static_cast<double>(n));
  const EnvironmentSet envs = EnvironmentSet::gaussian_means(triangle_means(pos_num(p, "radius")));
  const ValidationReport valid = validate_strong_vae_config(envs);
  const FrozenFit fits = frozen_fits(p, envs, seed);
  const Automorphism a =
      generator_transform(Generator::from_linear(fits.fa), Generator::from_linear(fits.fb));
  RngStream rng(seed, 2);
  auto [identity, rep] =
      is_identity_ae(a, *GaussianDistribution::standard(2), check_n, tol, rng, inter_decile_box(2));
  r.rows.push_back({seed, rep.identity_sup_dev, rep.identity_rms_dev, tol, valid.pass,
                    valid.pass && identity});
  r.report = {{"validation", valid.to_json()}, {"identity", rep.to_json()}};
  r.claims.push_back(claim("config_valid", valid.pass, valid.failing_clause, ""));
  r.claims.push_back(claim("identity", identity, rep.identity_sup_dev, tol));
  return r;
}

std::vector<Claim> aggregate_strong_vae(const Json& p, const std::vector<SeedResult>& seeds) {
  std::size_t passes = 0;
  bool valid = true;
  for (const auto& s : seeds) {
    valid = valid && s.claims[0].pass;
    if (s.claims[1].pass) ++passes;
  }
  const std::size_t need = pcount(p, "min_passes");
  return {claim("config_valid", valid, valid, true),
          claim("identity_passes", passes >= need, passes, need)};
}

SeedResult run_ivae_affine(const Json& p, std::uint64_t seed) {
  SeedResult r;
  const std::size_t check_n = pcount(p, "check_n"), n_eval = pcount(p, "n_eval");
  const double factor = pos_num(p, "factor"), max_cond = pos_num(p, "max_condition");
  const EnvironmentSet envs = EnvironmentSet::gaussian_means(triangle_means(pos_num(p, "radius")));
  const FrozenFit fits = frozen_fits(p, envs, seed);
  const Box box = inter_decile_box(2);
  const auto reference = GaussianDistribution::standard(2);

  RngStream rng(seed, 2);
  const Automorphism frozen =
      generator_transform(Generator::from_linear(fits.fa), Generator::from_linear(fits.fb));
  const auto frozen_rep = is_identity_ae(frozen, *reference, check_n, 1.0, rng, box).second;

  const LearnedPriorFit la = fit_learned_prior_linear(fits.half_a, Whitening::Cholesky);
  const LearnedPriorFit lb = fit_learned_prior_linear(fits.half_b, Whitening::Symmetric);
  const Generator ga = Generator::from_linear(la.generator), gb = Generator::from_linear(lb.generator);
  const Generator truth = Generator::from_linear(LinearGenerator(pmat(p, "loading"), pvec(p, "offset")));
  RngStream eval_rng(seed, 3);
  const Dataset eval = generate_environment_data(envs, truth, pnum(p, "noise_sd"),
                                                 std::max<std::size_t>(n_eval / envs.size(), 1), eval_rng);
  const AffineRelation rel = affine_relation_fit(ga.inverse_rows(eval.x), gb.inverse_rows(eval.x));

  RngStream rng2(seed, 4);
  const Automorphism learned = generator_transform(ga, gb);
  const auto learned_rep = is_identity_ae(learned, *reference, check_n, 1.0, rng2, box).second;

  const double bound = factor * frozen_rep.identity_sup_dev;
  const bool pass = rel.residual < bound && rel.condition < max_cond;
  r.rows.push_back({seed, frozen_rep.identity_sup_dev, rel.residual, rel.condition,
                    learned_rep.identity_sup_dev, pass});
  Json means_a = Json::array(), means_b = Json::array();
  for (const auto& m : la.latent_means) means_a.push_back(vector_to_json(m));
  for (const auto& m : lb.latent_means) means_b.push_back(vector_to_json(m));
  r.report = {{"frozen_identity", frozen_rep.to_json()},
              {"relation", rel.to_json()},
              {"learned_identity", learned_rep.to_json()},
              {"learned_means_a", means_a},
              {"learned_means_b", means_b}};
  r.claims.push_back(claim("affine_relation", rel.residual < bound, rel.residual, bound));
  r.claims.push_back(claim("relation_invertible", rel.condition < max_cond, rel.condition, max_cond));
  return r;
}

// --- two-labs -------------------------------------------------------------------

bool lower_positive(const LinearGenerator& g) {
  const MatrixXd& f = g.loading();
  return f.rows() == f.cols() && num::is_lower_triangular(f) && (f.diagonal().array() > 0.0).all();
}

SeedResult run_two_labs(const Json& p, std::uint64_t seed) {
  SeedResult r;
  const std::size_t n = pcount(p, "n");
  const double ks_factor = pos_num(p, "ks_factor");
  AuditOptions opts;
  opts.alpha = pos_num(p, "alpha");
  opts.identity_tol = pos_num(p, "identity_tol");
  opts.identity_n = 2000;
  RngStream rng(seed, 0);
  const MatrixXd f_free = random_matrix(2, 2, rng) + 2.0 * MatrixXd::Identity(2, 2);
  const MatrixXd f_tri = random_lower_positive(2, rng);
  const DistributionPtr gauss = GaussianDistribution::standard(2);
  const DistributionPtr laplace = laplace_product(2, 1.0 / std::sqrt(2.0));  // unit variance
  const MatrixXd rot_g = *Automorphism::plane_rotation(2, 0, 1, pnum(p, "gaussian_angle")).matrix();
  const MatrixXd rot_l = *Automorphism::plane_rotation(2, 0, 1, pnum(p, "laplace_angle")).matrix();
  MatrixXd swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  const MatrixXd flip = *Automorphism::coordinate_flip(2, 0).matrix();

  struct Cell {
    std::string prior, cls, candidate;
    DistributionPtr dist;
    MatrixXd fa, fb;
  };
  auto refit = [](const MatrixXd& f) {
    // the triangular representative of the observed covariance F F^T (unit-variance priors)
    const MatrixXd c = f * f.transpose();
    return MatrixXd(Eigen::LLT<MatrixXd>(0.5 * (c + c.transpose())).matrixL());
  };
  std::vector<Cell> cells{
      {"gaussian", "unrestricted", "rotation", gauss, f_free, f_free * rot_g.inverse()},
      {"gaussian", "triangular", "rotation", gauss, f_tri, f_tri * rot_g.inverse()},
      {"gaussian", "triangular", "refit", gauss, f_tri, refit(f_tri)},
      {"laplace", "unrestricted", "rotation", laplace, f_free, f_free * rot_l.inverse()},
      {"laplace", "unrestricted", "permutation", laplace, f_free, f_free * swap},
      {"laplace", "unrestricted", "sign_flip", laplace, f_free, f_free * flip},
      {"laplace", "triangular", "permutation", laplace, f_tri, f_tri * swap},
      {"laplace", "triangular", "sign_flip", laplace, f_tri, f_tri * flip},
      {"laplace", "triangular", "refit", laplace, f_tri, refit(f_tri)},
  };
  Json reports = Json::array();
  std::map<std::string, bool> admissible_non_identity;
  bool refits_identity = true, gaussian_weak = false, laplace_rejected = false;
  double laplace_ratio = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const LinearGenerator ga(c.fa), gb(c.fb);
    const bool in_class = c.cls == "unrestricted" || lower_positive(gb);
    const ModelParams ta{Generator::from_linear(ga), c.dist}, tb{Generator::from_linear(gb), c.dist};
    RngStream audit_rng(seed, 10 + i);
    const IndeterminacyReport rep = indeterminacy_audit(ta, tb, n, audit_rng, opts);
    const double max_ks = std::max(rep.forward_check->max_statistic(), rep.backward_check->max_statistic());
    const double crit = rep.forward_check->critical_value;
    const bool admissible = in_class && rep.pushforward_pass && !rep.structure.is_identity_ae;
    const std::string key = c.prior + "/" + c.cls;
    admissible_non_identity[key] = admissible_non_identity[key] || admissible;
    bool pass = true;
    if (c.candidate == "refit") {
      pass = rep.structure.is_identity_ae && rep.pushforward_pass;
      refits_identity = refits_identity && pass;
    } else if (key == "gaussian/unrestricted") {
      pass = gaussian_weak = rep.pushforward_pass && !rep.structure.is_identity_ae;
    } else if (key == "laplace/unrestricted" && c.candidate == "rotation") {
      laplace_ratio = max_ks / crit;
      pass = laplace_rejected = !rep.pushforward_pass && laplace_ratio >= ks_factor;
    } else if (c.cls == "triangular") {
      pass = !in_class;
    } else {
      pass = admissible;
    }
    r.rows.push_back({seed, c.prior, c.cls, c.candidate, in_class, rep.pushforward_pass, max_ks, crit,
                      rep.structure.is_identity_ae, rep.structure.is_component_wise, admissible, pass});
    Json j = rep.to_json();
    j["prior"] = c.prior;
    j["generator_class"] = c.cls;
    j["candidate"] = c.candidate;
    j["in_class"] = in_class;
    reports.push_back(j);
  }
  const bool intersection = admissible_non_identity["gaussian/unrestricted"] &&
                            admissible_non_identity["laplace/unrestricted"] &&
                            !admissible_non_identity["gaussian/triangular"] &&
                            !admissible_non_identity["laplace/triangular"] && refits_identity;
  r.report = {{"cells", reports}, {"laplace_ks_ratio", laplace_ratio}};
  r.claims.push_back(claim("gaussian_rotation_weak", gaussian_weak, gaussian_weak, true));
  r.claims.push_back(claim("laplace_rotation_rejected", laplace_rejected, laplace_ratio, ks_factor));
  r.claims.push_back(claim("intersection_logic", intersection, intersection, true));
  return r;
}

// --- task-shift -----------------------------------------------------------------

SeedResult run_task_shift(const Json& p, std::uint64_t seed) {
  SeedResult r;
  const double delta = pnum(p, "delta"), tol = pos_num(p, "tol");
  const double expected = pnum(p, "expected_distance");
  const std::size_t k = pcount(p, "coord");
  const MatrixXd obs = pmat(p, "obs");
  const VectorXd c = pvec(p, "constant_point");
  if (obs.cols() != 3 || c.size() != 2 || k >= 2)
    throw ConfigError("task-shift uses a 2-d latent embedded in R^3");
  const ModelParams theta{Generator::coordinate_embedding(2, 3), GaussianDistribution::standard(2)};
  const Automorphism rot = Automorphism::plane_rotation(2, 0, 1, pnum(p, "angle"));
  const Automorphism shift = Automorphism::translation(pvec(p, "translation"));
  const Automorphism id = Automorphism::identity(2);
  TaskCheckOptions fixed;
  fixed.verify_n = pcount(p, "verify_n");
  TaskCheckOptions learned = fixed;
  learned.prior_fixed = false;

  struct Case {
    std::string name;
    TaskSpec task;
    Automorphism a;
    TaskCheckOptions opts;
  };
  std::vector<Case> cases{
      {"shift_rotation", latent_shift_task(delta, k), rot, fixed},
      {"shift_translation", latent_shift_task(delta, k), shift, learned},
      {"shift_identity", latent_shift_task(delta, k), id, fixed},
      {"zero_shift_rotation", latent_shift_task(0.0, k), rot, fixed},
      {"constant_rotation", constant_point_task(c), rot, fixed},
      {"constant_origin_rotation", constant_point_task(VectorXd::Zero(2)), rot, fixed},
      {"constant_identity", constant_point_task(c), id, fixed},
  };
  std::map<std::string, double> dist;
  Json reports = Json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    RngStream rng(seed, i);
    const TaskReport rep = task_identifiability_check(cases[i].task, theta, {cases[i].a}, obs, tol,
                                                      rng, cases[i].opts);
    dist[cases[i].name] = rep.max_distance;
    r.rows.push_back({seed, cases[i].task.name, cases[i].name, rep.max_distance, rep.identifiable});
    Json j = rep.to_json();
    j["case"] = cases[i].name;
    reports.push_back(j);
  }
  // selection equivariance s(A theta, x) = A(s(theta, x))
  double equivariance = 0.0;
  for (const auto* a : {&rot, &shift}) {
    const ModelParams moved = act_on_params(*a, theta);
    equivariance = std::max(equivariance, sup_rows(moved.generator.inverse_rows(obs),
                                                   a->forward_rows(theta.generator.inverse_rows(obs))));
  }
  const double shift_err = std::abs(dist["shift_rotation"] - expected);
  r.report = {{"cases", reports}, {"selection_equivariance", equivariance}};
  r.claims.push_back(claim("rotation_unidentifiable", shift_err <= 1e-9 && dist["shift_rotation"] >= tol,
                           dist["shift_rotation"], expected));
  r.claims.push_back(claim("translation_identifiable", dist["shift_translation"] < tol,
                           dist["shift_translation"], tol));
  r.claims.push_back(claim("identity_only_identifiable",
                           dist["shift_identity"] < tol && dist["constant_identity"] < tol,
                           std::max(dist["shift_identity"], dist["constant_identity"]), tol));
  r.claims.push_back(claim("zero_shift_identifiable", dist["zero_shift_rotation"] < tol,
                           dist["zero_shift_rotation"], tol));
  r.claims.push_back(claim("constant_point_unidentifiable", dist["constant_rotation"] >= tol,
                           dist["constant_rotation"], tol));
  r.claims.push_back(claim("fixed_point_identifiable", dist["constant_origin_rotation"] < tol,
                           dist["constant_origin_rotation"], tol));
  r.claims.push_back(claim("selection_equivariance", equivariance < 1e-8, equivariance, 1e-8));
  for (auto& row : r.rows) row.push_back(true);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& name = cases[i].name;
    bool ok = true;
    if (name == "shift_rotation") ok = r.claims[0].pass;
    else if (name == "constant_rotation") ok = r.claims[4].pass;
    else ok = dist[name] < tol;
    r.rows[i].back() = ok;
  }
  return r;
}

// --- task-indep -----------------------------------------------------------------

SeedResult run_task_indep(const Json& p, std::uint64_t seed) {
  SeedResult r;
  const std::size_t n = pcount(p, "n"), j = pcount(p, "obs_coord"), k = pcount(p, "latent_coord");
  const std::size_t perms = pcount(p, "permutations");
  const double null_bound = pos_num(p, "null_bound");
  if (j >= 2 || k >= 2) throw ConfigError("task-indep uses two observed and two latent coordinates");
  MatrixXd f(2, 2);
  f << 1.0, 0.5, 0.3, 1.0;
  const ModelParams theta{Generator::from_linear(LinearGenerator(f)), laplace_product(2, 1.0)};
  RngStream rng(seed, 0);
  const MatrixXd obs = theta.generator.forward_rows(sample(*theta.prior, rng, n));

  const Automorphism inc = Automorphism::component_wise(
      2, [](std::size_t i, double t) { return i == 0 ? std::sinh(t) : 2.0 * t + 1.0; },
      [](std::size_t i, double t) { return i == 0 ? std::asinh(t) : 0.5 * (t - 1.0); }, "increasing");
  const Automorphism dec = Automorphism::component_wise(
      2, [](std::size_t i, double t) { return i == 0 ? -t * t * t : -std::sinh(t); },
      [](std::size_t i, double t) { return i == 0 ? std::cbrt(-t) : std::asinh(-t); }, "decreasing");
  TaskCheckOptions opts;
  opts.prior_fixed = false;
  opts.verify_n = pcount(p, "verify_n");
  const TaskSpec task = independence_test_task(j, k, n);
  RngStream c1 = rng.child(1), c2 = rng.child(2);
  const TaskReport mono = task_identifiability_check(task, theta, {inc, dec}, obs, 1e-300, c1, opts);
  const TaskReport ident =
      task_identifiability_check(task, theta, {Automorphism::identity(2)}, obs, 1e-300, c2, opts);
  const double stat = task.run(theta, obs)(0, 0);

  RngStream null_rng = rng.child(3);
  VectorXd u(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    u(static_cast<Eigen::Index>(i)) = null_rng.normal();
    v(static_cast<Eigen::Index>(i)) = null_rng.normal();
  }
  const double null_stat = std::abs(spearman_rho(u, v));
  const VectorXd col = obs.col(static_cast<Eigen::Index>(j));
  const double self_stat = std::abs(spearman_rho(col, col));
  RngStream perm_rng = rng.child(4);
  const double pvalue = spearman_permutation_pvalue(
      col, theta.generator.inverse_rows(obs).col(static_cast<Eigen::Index>(k)), perms, perm_rng);

  r.rows.push_back({seed, "monotone_transforms", stat, mono.max_distance, mono.max_distance == 0.0,
                    mono.max_distance == 0.0});
  r.rows.push_back({seed, "identity_only", stat, ident.max_distance, ident.max_distance == 0.0,
                    ident.max_distance == 0.0});
  r.rows.push_back({seed, "independent_null", null_stat, nullptr, nullptr, null_stat < null_bound});
  r.rows.push_back({seed, "self_dependence", self_stat, nullptr, nullptr, self_stat == 1.0});
  r.report = {{"statistic", stat},
              {"permutation_pvalue", pvalue},
              {"monotone", mono.to_json()},
              {"identity", ident.to_json()},
              {"null_statistic", null_stat},
              {"self_statistic", self_stat}};
  r.claims.push_back(claim("monotone_invariance_exact", mono.max_distance == 0.0, mono.max_distance, 0.0));
  r.claims.push_back(claim("identity_only_exact", ident.max_distance == 0.0, ident.max_distance, 0.0));
  r.claims.push_back(claim("null_statistic_small", null_stat < null_bound, null_stat, null_bound));
  r.claims.push_back(claim("self_statistic_one", self_stat == 1.0, self_stat, 1.0));
  return r;
}

// --- multiview ------------------------------------------------------------------

SeedResult run_multiview(const Json& p, std::uint64_t seed) {
  SeedResult r;
  const std::size_t n = pcount(p, "n");
  const double tol = pos_num(p, "tol");
  const auto prior = GaussianDistribution::standard(2);
  const TriangularMap tmi = explicit_map_by_name("sinh_shear", 2);
  const Automorphism bend = tmi.as_automorphism();
  const Automorphism free_map = Automorphism::plane_rotation(2, 0, 1, 0.4)
                                    .after(bend)
                                    .after(Automorphism::plane_rotation(2, 0, 1, -1.1));
  const Generator view_tmi = Generator::from_triangular(tmi);
  const Generator view_free = Generator::from_automorphism(free_map);
  const MultiViewModel model_a({"tmi", "free"}, {view_tmi, view_free});

  // same functions, built along a different route
  const Automorphism detour = explicit_map_by_name("cubic_shear", 2).as_automorphism();
  const MultiViewModel model_same(
      {"tmi", "free"}, {Generator::from_triangular(explicit_map_by_name("sinh_shear", 2)),
                        view_free.after(detour.inverted()).after(detour)});
  const Automorphism rot_inv = Automorphism::plane_rotation(2, 0, 1, pnum(p, "angle")).inverted();
  const MultiViewModel model_rot({"tmi", "free"}, {view_tmi.after(rot_inv), view_free.after(rot_inv)});

  RngStream ra(seed, 0), rb(seed, 1);
  const MultiViewReport same = verify_multiview(model_a, model_same, *prior, n, ra, tol);
  const MultiViewReport rot = verify_multiview(model_a, model_rot, *prior, n, rb, tol);
  for (const auto* rep : {&same, &rot}) {
    const std::string cfg = rep == &same ? "tmi_plus_free" : "consistent_rotation";
    const bool ok = rep == &same ? rep->identified : !rep->identified;
    for (std::size_t v = 0; v < rep->labels.size(); ++v)
      r.rows.push_back({seed, cfg, rep->labels[v], rep->identity_sup_dev[v], rep->max_disagreement,
                        rep->identified, ok});
  }
  r.report = {{"tmi_plus_free", same.to_json()}, {"consistent_rotation", rot.to_json()}};
  r.claims.push_back(claim("tmi_view_identifies", same.identified && same.max_disagreement < tol,
                           same.max_disagreement, tol));
  r.claims.push_back(claim("rotation_unidentified", !rot.identified, rot.identified, false));
  return r;
}

// --- registry -------------------------------------------------------------------

std::vector<ExperimentInfo> build_registry() {
  const Json mixing = Json::array({Json::array({1.0, 0.3}), Json::array({-0.4, 0.8})});
  std::vector<ExperimentInfo> reg;
  reg.push_back({"kr-identity", "TMI generators: the identity is the only triangular self-transport", 2.0,
                 {{"seeds", 1}, {"dims", {1, 2, 3}}, {"priors", {"gaussian", "laplace_product", "mixture"}},
                  {"n", 1000}, {"tol", 1e-6}},
                 {"seed", "prior", "dim", "n", "sup_dev", "rms_dev", "cost_ratio", "pass"},
                 run_kr_identity, nullptr});
  reg.push_back({"kr-gaussian", "KR recursion through conditional CDFs matches the Cholesky map", 3.0,
                 {{"seeds", 1}, {"trials", 10}, {"max_dim", 4}, {"n", 1000}, {"check_n", 2000}, {"tol", 1e-5}},
                 {"seed", "trial", "dim", "sup_dev", "pushforward_pass", "pass"}, run_kr_gaussian, nullptr});
  reg.push_back({"ica-comon", "independent priors: indeterminacy is component-wise (scaling and permutation)",
                 2.0, {{"seeds", 1}, {"probes", 200}, {"tol", 1e-4}, {"n", 5000}},
                 {"seed", "case", "max_cross_partial", "comon_pass", "pushforward_pass", "pass"},
                 run_ica_comon, nullptr});
  reg.push_back({"fa-rotation", "two environments: reflection about the mean-difference axis", 0.1,
                 {{"seeds", 1}, {"mu1", {0.0, 0.0}}, {"mu2", {0.7071067811865476, 0.7071067811865476}},
                  {"obs_dim", 10}, {"tol", 1e-12}, {"min_distance", 0.5}},
                 {"seed", "mean_residual_1", "mean_residual_2", "covariance_residual", "loading_distance",
                  "two_env_unique", "pass"},
                 run_fa_rotation, nullptr});
  reg.push_back({"fa-three-env", "three spanning environments pin down the factor loading", 0.1,
                 {{"seeds", 1}, {"means", {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}}, {"obs_dim", 5}, {"tol", 1e-8}},
                 {"seed", "n_envs", "contrast_rank", "unique", "recovered_distance", "pass"},
                 run_fa_three_env, nullptr});
  reg.push_back({"expfam-kernel", "shared automorphisms move T(z) only within ker M", 1.0,
                 {{"seeds", 1}, {"means", {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}}, {"probes", 200},
                  {"tol", 1e-12}, {"shift", 0.1}, {"n", 5000}},
                 {"seed", "transform", "kernel_residual", "fixed_coords_pass", "pushforward_pass", "pass"},
                 run_expfam_kernel, nullptr});
  reg.push_back({"strong-vae", "fixed spanning exponential-family priors give strong identifiability", 30.0,
                 {{"seeds", 20}, {"min_passes", 19}, {"n", 100000}, {"radius", 4.0}, {"loading", mixing},
                  {"offset", {0.5, -1.0}}, {"noise_sd", 0.0}, {"tol_factor", 5.0}, {"check_n", 2000}},
                 {"seed", "sup_dev", "rms_dev", "tol", "config_valid", "pass"}, run_strong_vae,
                 aggregate_strong_vae});
  reg.push_back({"ivae-affine", "learned priors: sufficient statistics agree up to an affine map", 3.0,
                 {{"seeds", 1}, {"n", 100000}, {"radius", 4.0}, {"loading", mixing}, {"offset", {0.5, -1.0}},
                  {"noise_sd", 0.0}, {"n_eval", 10000}, {"factor", 10.0}, {"max_condition", 1000.0},
                  {"check_n", 2000}},
                 {"seed", "frozen_sup_dev", "relation_residual", "condition", "learned_identity_dev", "pass"},
                 run_ivae_affine, nullptr});
  reg.push_back({"two-labs", "equivalent fits differ by a prior-preserving map of the generator class", 10.0,
                 {{"seeds", 1}, {"n", 100000}, {"gaussian_angle", 0.7},
                  {"laplace_angle", std::numbers::pi / 4.0}, {"alpha", 0.01}, {"ks_factor", 3.0},
                  {"identity_tol", 1e-6}},
                 {"seed", "prior", "generator_class", "candidate", "in_class", "pushforward_pass", "max_ks",
                  "critical_value", "identity_pass", "component_wise", "admissible_non_identity", "pass"},
                 run_two_labs, nullptr});
  reg.push_back({"task-shift", "a latent shift task is not identifiable under rotations", 1.0,
                 {{"seeds", 1}, {"delta", 1.0}, {"coord", 0}, {"angle", std::numbers::pi / 2.0},
                  {"obs", {{1.0, 0.0, 0.0}}}, {"translation", {0.3, -0.2}}, {"constant_point", {1.0, 0.0}},
                  {"tol", 1e-9}, {"expected_distance", std::numbers::sqrt2}, {"verify_n", 2000}},
                 {"seed", "task", "case", "distance", "identifiable", "pass"}, run_task_shift, nullptr});
  reg.push_back({"task-indep", "rank independence tests survive component-wise indeterminacy", 1.0,
                 {{"seeds", 1}, {"n", 1000}, {"obs_coord", 0}, {"latent_coord", 0}, {"permutations", 200},
                  {"null_bound", 0.08}, {"verify_n", 2000}},
                 {"seed", "case", "statistic", "distance", "identifiable", "pass"}, run_task_indep, nullptr});
  reg.push_back({"multiview", "identification in one view identifies every view", 1.0,
                 {{"seeds", 1}, {"n", 2000}, {"tol", 1e-6}, {"angle", 0.6}},
                 {"seed", "config", "view", "identity_sup_dev", "max_disagreement", "identified", "pass"},
                 run_multiview, nullptr});
  return reg;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> reg = build_registry();
  return reg;
}

const ExperimentInfo* find_experiment(const std::string& name) {
  for (const auto& e : experiment_registry())
    if (e.name == name) return &e;
  return nullptr;
}

namespace {

bool same_kind(const Json& def, const Json& val) {
  if (def.is_number_integer()) return val.is_number_integer();
  if (def.is_number()) return val.is_number();
  return def.type() == val.type();
}

}  // namespace

ExperimentConfig parse_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : doc.items())
    if (key != "experiment" && key != "seed" && key != "params" && key != "out_dir")
      throw ConfigError("unknown config field '" + key + "'");
  if (!doc.contains("experiment") || !doc["experiment"].is_string())
    throw ConfigError("config needs a string field 'experiment'");
  ExperimentConfig cfg;
  cfg.experiment = doc["experiment"].get<std::string>();
  const ExperimentInfo* info = find_experiment(cfg.experiment);
  if (!info) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0) throw ConfigError("seed must be a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("out_dir")) {
    if (!doc["out_dir"].is_string()) throw ConfigError("out_dir must be a string");
    cfg.out_dir = doc["out_dir"].get<std::string>();
  }
  cfg.params = info->default_params;
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) throw ConfigError("params must be an object");
    for (const auto& [key, val] : doc["params"].items()) {
      if (!cfg.params.contains(key))
        throw ConfigError("unknown parameter '" + key + "' for " + cfg.experiment);
      if (!same_kind(cfg.params[key], val))
        throw ConfigError("parameter '" + key + "' has the wrong type");
      cfg.params[key] = val;
    }
  }
  if (cfg.params["seeds"].get<long long>() < 1) throw ConfigError("seeds must be at least 1");
  return cfg;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, std::size_t jobs) {
  const ExperimentInfo* info = find_experiment(config.experiment);
  if (!info) throw ConfigError("unknown experiment '" + config.experiment + "'");
  const auto n_seeds = config.params.at("seeds").get<std::size_t>();
  std::vector<SeedResult> results(n_seeds);
  std::vector<std::exception_ptr> errors(n_seeds);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_seeds; i = next++) {
      try {
        try {
          results[i] = info->run_seed(config.params, config.seed + i);
        } catch (const Json::exception& e) {
          throw ConfigError(std::string("malformed parameter: ") + e.what());
        }
        results[i].seed = config.seed + i;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, n_seeds);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<Claim> claims;
  if (info->aggregate) {
    claims = info->aggregate(config.params, results);
  } else {
    for (std::size_t c = 0; c < results.front().claims.size(); ++c) {
      Claim merged = results.front().claims[c];
      if (n_seeds > 1) {
        Json values = Json::array();
        for (const auto& s : results) {
          merged.pass = merged.pass && s.claims[c].pass;
          values.push_back(s.claims[c].value);
        }
        merged.value = values;
      }
      claims.push_back(merged);
    }
  }

  ExperimentOutcome out;
  out.pass = std::all_of(claims.begin(), claims.end(), [](const Claim& c) { return c.pass; });
  out.csv_columns = info->csv_columns;
  Json claims_json = Json::array(), per_seed = Json::array();
  for (const auto& c : claims) claims_json.push_back(c.to_json());
  for (const auto& s : results) {
    Json sc = Json::array();
    for (const auto& c : s.claims) sc.push_back(c.to_json());
    per_seed.push_back({{"seed", s.seed}, {"claims", sc}, {"report", s.report}});
    for (const auto& row : s.rows) out.rows.push_back(row);
  }
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  out.results = {{"experiment", info->name},
                 {"anchor", info->anchor},
                 {"seed", config.seed},
                 {"params", config.params},
                 {"pass", out.pass},
                 {"claims", claims_json},
                 {"per_seed", per_seed},
                 {"generated_at", stamp}};
  if (n_seeds == 1) out.results["report"] = results.front().report;
  out.config_echo = {{"experiment", config.experiment},
                     {"seed", config.seed},
                     {"params", config.params},
                     {"out_dir", config.out_dir}};
  return out;
}

std::string format_csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  return v.dump();
}

namespace {

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_outcome(const ExperimentConfig& config, const ExperimentOutcome& outcome) {
  namespace fs = std::filesystem;
  const fs::path dir = config.out_dir.empty() ? fs::path("results") / config.experiment : fs::path(config.out_dir);
  fs::create_directories(dir / "tables");
  std::string csv;
  for (std::size_t i = 0; i < outcome.csv_columns.size(); ++i)
    csv += (i ? "," : "") + outcome.csv_columns[i];
  csv += '\n';
  for (const auto& row : outcome.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) csv += (i ? "," : "") + format_csv_cell(row[i]);
    csv += '\n';
  }
  write_atomically(dir / "tables" / (config.experiment + ".csv"), csv);
  write_atomically(dir / "config.echo.json", outcome.config_echo.dump(2) + "\n");
  write_atomically(dir / "results.json", outcome.results.dump(2) + "\n");
}

Json strip_timestamp(Json results) {
  results.erase("generated_at");
  return results;
}

Json config_schema() {
  Json experiments = Json::array();
  Json names = Json::array();
  for (const auto& e : experiment_registry()) {
    names.push_back(e.name);
    experiments.push_back({{"if", {{"properties", {{"experiment", {{"const", e.name}}}}}}},
                           {"then",
                            {{"properties",
                              {{"params",
                                {{"type", "object"},
                                 {"additionalProperties", false},
                                 {"properties", [&] {
                                    Json props = Json::object();
                                    for (const auto& [k, v] : e.default_params.items()) {
                                      std::string type = v.is_number_integer() ? "integer"
                                                         : v.is_number()       ? "number"
                                                         : v.is_boolean()      ? "boolean"
                                                         : v.is_string()       ? "string"
                                                         : v.is_array()        ? "array"
                                                                               : "object";
                                      props[k] = {{"type", type}, {"default", v}};
                                    }
                                    return props;
                                  }()}}}}}}},
                           {"x-csv-columns", e.csv_columns},
                           {"x-anchor", e.anchor}});
  }
  return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
          {"title", "idlab experiment config"},
          {"type", "object"},
          {"required", {"experiment"}},
          {"additionalProperties", false},
          {"properties",
           {{"experiment", {{"type", "string"}, {"enum", names}}},
            {"seed", {{"type", "integer"}, {"minimum", 0}, {"default", 0}}},
            {"out_dir", {{"type", "string"}}},
            {"params", {{"type", "object"}}}}},
          {"allOf", experiments}};
}

}  // namespace idlab
