#include "idlab/envs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "idlab/errors.hpp"

namespace idlab {

EnvironmentSet::EnvironmentSet(std::vector<std::string> labels, std::vector<DistributionPtr> priors)
    : labels_(std::move(labels)), priors_(std::move(priors)) {
  if (priors_.empty()) throw std::invalid_argument("environment set: no environments");
  if (labels_.size() != priors_.size())
    throw std::invalid_argument("environment set: one label per prior");
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != labels_.size())
    throw std::invalid_argument("environment set: duplicate labels");
  for (const auto& p : priors_) {
    if (!p) throw std::invalid_argument("environment set: null prior");
    if (p->dim() != priors_.front()->dim())
      throw DimensionMismatch("environment set: priors have different dims");
  }
}

EnvironmentSet EnvironmentSet::from_expfam(std::vector<std::string> labels,
                                           std::vector<std::shared_ptr<const ExpFamily>> priors) {
  std::vector<DistributionPtr> generic(priors.begin(), priors.end());
  EnvironmentSet set(std::move(labels), std::move(generic));
  const auto& s0 = priors.front()->structure();
  const MatrixXd grid = default_probes(s0.dim, 50);
  for (const auto& p : priors) {
    const auto& s = p->structure();
    if (s.family_id != s0.family_id || s.dim != s0.dim || s.stat_dim != s0.stat_dim)
      throw MismatchedFamily("environment priors do not share one sufficient statistic");
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
      const VectorXd z = grid.row(r).transpose();
      const double form = s0.log_base_measure(z) + p->eta().dot(s0.suff_stat(z)) -
                          p->log_partition(p->eta());
      const double got = p->log_density(z);
      if (std::abs(std::exp(form) - std::exp(got)) > 1e-10)
        throw MismatchedFamily("environment prior deviates from the shared family form");
    }
  }
  set.expfam_ = std::move(priors);
  return set;
}

EnvironmentSet EnvironmentSet::gaussian_means(const std::vector<VectorXd>& etas) {
  std::vector<std::string> labels;
  std::vector<std::shared_ptr<const ExpFamily>> priors;
  for (std::size_t e = 0; e < etas.size(); ++e) {
    labels.push_back("e" + std::to_string(e));
    priors.push_back(ExpFamily::gaussian_mean(etas[e]));
  }
  return from_expfam(std::move(labels), std::move(priors));
}

const DistributionPtr& EnvironmentSet::prior(const std::string& label) const {
  for (std::size_t e = 0; e < labels_.size(); ++e)
    if (labels_[e] == label) return priors_[e];
  throw std::out_of_range("no environment '" + label + "'");
}

const ExpFamily::Structure& EnvironmentSet::shared_stat() const {
  if (expfam_.empty()) throw std::logic_error("environment set has no shared statistic");
  return expfam_.front()->structure();
}

MatrixXd EnvironmentSet::eta_matrix() const {
  const auto& s = shared_stat();
  MatrixXd m(static_cast<Eigen::Index>(expfam_.size()), static_cast<Eigen::Index>(s.stat_dim));
  for (std::size_t e = 0; e < expfam_.size(); ++e)
    m.row(static_cast<Eigen::Index>(e)) = expfam_[e]->eta().transpose();
  return m;
}

// ---------------------------------------------------------------------------

namespace {

MatrixXd select_rows(const MatrixXd& m, const std::vector<std::size_t>& env, std::size_t e) {
  const auto count = std::count(env.begin(), env.end(), e);
  MatrixXd out(count, m.cols());
  Eigen::Index k = 0;
  for (std::size_t r = 0; r < env.size(); ++r)
    if (env[r] == e) out.row(k++) = m.row(static_cast<Eigen::Index>(r));
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

MatrixXd Dataset::x_of(std::size_t e) const { return select_rows(x, env, e); }
MatrixXd Dataset::z_of(std::size_t e) const { return select_rows(z, env, e); }

void Dataset::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (Eigen::Index j = 0; j < x.cols(); ++j) out << "x_" << j + 1 << ',';
  for (Eigen::Index j = 0; j < z.cols(); ++j) out << "z_" << j + 1 << ',';
  out << "env\n";
  char buf[32];
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", x(r, j));
      out << buf << ',';
    }
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", z(r, j));
      out << buf << ',';
    }
    out << env_labels[env[static_cast<std::size_t>(r)]] << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

Dataset Dataset::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("dataset " + path + " is empty");
  const auto header = split_csv(line);
  std::size_t dx = 0, dz = 0;
  for (const auto& h : header) {
    if (h.rfind("x_", 0) == 0) ++dx;
    else if (h.rfind("z_", 0) == 0) ++dz;
  }
  if (header.empty() || header.back() != "env" || dx + dz + 1 != header.size())
    throw ConfigError("dataset header must be x_1..x_dx, z_1..z_dz, env");
  std::vector<std::vector<double>> rows;
  Dataset d;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw ConfigError("dataset row has wrong width");
    std::vector<double> vals;
    for (std::size_t j = 0; j + 1 < cells.size(); ++j) vals.push_back(std::stod(cells[j]));
    rows.push_back(std::move(vals));
    const auto it = std::find(d.env_labels.begin(), d.env_labels.end(), cells.back());
    if (it == d.env_labels.end()) {
      d.env.push_back(d.env_labels.size());
      d.env_labels.push_back(cells.back());
    } else {
      d.env.push_back(static_cast<std::size_t>(it - d.env_labels.begin()));
    }
  }
  d.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dx));
  d.z.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dz));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t j = 0; j < dx; ++j) d.x(r, j) = rows[r][j];
    for (std::size_t j = 0; j < dz; ++j) d.z(r, j) = rows[r][dx + j];
  }
  return d;
}

Dataset generate_environment_data(const EnvironmentSet& envs, const Generator& generator,
                                  double noise_sd, std::size_t n_per_env, RngStream& rng) {
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("noise_sd must be non-negative");
  if (generator.latent_dim() != envs.dim())
    throw DimensionMismatch("generator latent dim differs from the environment priors");
  Dataset d;
  d.env_labels = envs.labels();
  const auto n = static_cast<Eigen::Index>(n_per_env * envs.size());
  d.x.resize(n, static_cast<Eigen::Index>(generator.obs_dim()));
  d.z.resize(n, static_cast<Eigen::Index>(envs.dim()));
  d.env.reserve(static_cast<std::size_t>(n));
  Eigen::Index row = 0;
  for (std::size_t e = 0; e < envs.size(); ++e) {
    RngStream latent_rng = rng.child(2 * e), noise_rng = rng.child(2 * e + 1);
    const MatrixXd z = sample(*envs.priors()[e], latent_rng, n_per_env);
    for (Eigen::Index r = 0; r < z.rows(); ++r, ++row) {
      d.z.row(row) = z.row(r);
      VectorXd x = generator.forward(z.row(r).transpose());
      if (noise_sd > 0.0)
        for (Eigen::Index j = 0; j < x.size(); ++j) x(j) += noise_sd * noise_rng.normal();
      d.x.row(row) = x.transpose();
      d.env.push_back(e);
    }
  }
  return d;
}

// ---------------------------------------------------------------------------

Json SpanReport::to_json() const {
  return Json{{"stat_dim", stat_dim},
              {"raw_rank", raw_rank},
              {"contrast_rank", contrast_rank},
              {"spans", spans}};
}

SpanReport spanning_check(const std::vector<VectorXd>& etas) {
  if (etas.empty()) throw std::invalid_argument("spanning_check: no parameters");
  const auto k = etas.front().size();
  MatrixXd raw(static_cast<Eigen::Index>(etas.size()), k);
  for (std::size_t i = 0; i < etas.size(); ++i) {
    if (etas[i].size() != k) throw DimensionMismatch("spanning_check: parameter dims differ");
    raw.row(static_cast<Eigen::Index>(i)) = etas[i].transpose();
  }
  SpanReport rep;
  rep.stat_dim = static_cast<std::size_t>(k);
  rep.raw_rank = raw.isZero(0.0) ? 0 : num::rank(raw);
  if (etas.size() > 1) {
    const MatrixXd contrasts = raw.bottomRows(raw.rows() - 1).rowwise() - raw.row(0);
    rep.contrast_rank = contrasts.isZero(0.0) ? 0 : num::rank(contrasts);
  }
  rep.spans = rep.contrast_rank == rep.stat_dim;
  return rep;
}

Json ValidationReport::to_json() const {
  return Json{{"pass", pass},
              {"failing_clause", failing_clause},
              {"span", span.to_json()},
              {"min_log_base_measure", min_log_base_measure},
              {"injective_coordinate_monotone", injective_coordinate_monotone}};
}

namespace {

// Tensor grid on [-r, r]^d with at most ~20000 points.
std::vector<VectorXd> probe_grid(std::size_t d, double r, std::size_t points) {
  std::size_t per = points;
  while (per > 3 && std::pow(static_cast<double>(per), static_cast<double>(d)) > 20000.0) --per;
  std::vector<double> axis(per);
  for (std::size_t i = 0; i < per; ++i)
    axis[i] = -r + 2.0 * r * static_cast<double>(i) / static_cast<double>(per - 1);
  std::vector<VectorXd> out;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    VectorXd z(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) z(static_cast<Eigen::Index>(j)) = axis[idx[j]];
    out.push_back(z);
    std::size_t j = 0;
    while (j < d && ++idx[j] == per) idx[j++] = 0;
    if (j == d) break;
  }
  return out;
}

}  // namespace

ValidationReport validate_strong_vae_config(const EnvironmentSet& envs,
                                            const StrongVaeOptions& opts) {
  const auto& s = envs.shared_stat();
  ValidationReport rep;
  std::vector<VectorXd> etas;
  for (const auto& p : envs.expfam_priors()) etas.push_back(p->eta());
  rep.span = spanning_check(etas);

  rep.min_log_base_measure = INFINITY;
  for (const auto& z : probe_grid(s.dim, opts.grid_radius, opts.grid_points)) {
    const double lm = s.log_base_measure(z);
    rep.min_log_base_measure = std::isnan(lm) ? -INFINITY : std::min(rep.min_log_base_measure, lm);
  }
  const bool positive = std::isfinite(rep.min_log_base_measure);

  const std::size_t c = opts.injective_coordinate;
  if (c >= s.dim || c >= s.stat_dim)
    throw std::invalid_argument("validate_strong_vae_config: declared coordinate out of range");
  rep.injective_coordinate_monotone = true;
  for (double other : {0.0, 1.0, -1.0}) {
    VectorXd z = VectorXd::Constant(static_cast<Eigen::Index>(s.dim), other);
    int sign = 0;
    double prev = 0.0;
    for (std::size_t i = 0; i < opts.grid_points; ++i) {
      z(static_cast<Eigen::Index>(c)) =
          -opts.grid_radius + 2.0 * opts.grid_radius * static_cast<double>(i) /
                                  static_cast<double>(opts.grid_points - 1);
      const double t = s.suff_stat(z)(static_cast<Eigen::Index>(c));
      if (i > 0) {
        const int step = t > prev ? 1 : (t < prev ? -1 : 0);
        if (step == 0 || (sign != 0 && step != sign)) rep.injective_coordinate_monotone = false;
        sign = step;
      }
      prev = t;
    }
  }

  if (!rep.span.spans) rep.failing_clause = "spanning";
  else if (!positive) rep.failing_clause = "base_measure";
  else if (!rep.injective_coordinate_monotone) rep.failing_clause = "injectivity";
  rep.pass = rep.failing_clause.empty();
  return rep;
}

Json AffineRelation::to_json() const {
  return Json{{"L", matrix_to_json(L)},
              {"d", vector_to_json(d)},
              {"residual", residual},
              {"condition", condition}};
}

AffineRelation affine_relation_fit(const MatrixXd& t_a, const MatrixXd& t_b) {
  if (t_a.rows() != t_b.rows() || t_a.cols() != t_b.cols())
    throw DimensionMismatch("affine_relation_fit: statistic tables differ in shape");
  const auto k = t_a.cols();
  if (t_a.rows() < k + 1) throw RankDeficient("affine_relation_fit: need at least K + 1 rows");
  const VectorXd ma = t_a.colwise().mean().transpose();
  const VectorXd mb = t_b.colwise().mean().transpose();
  const MatrixXd ca = t_a.rowwise() - ma.transpose();
  const MatrixXd cb = t_b.rowwise() - mb.transpose();
  if (num::rank(ca) < static_cast<std::size_t>(k))
    throw RankDeficient("affine_relation_fit: centered design is rank deficient");
  AffineRelation out;
  out.L = ca.colPivHouseholderQr().solve(cb);
  out.d = mb - out.L.transpose() * ma;
  const MatrixXd misfit = (t_a * out.L).rowwise() + out.d.transpose() - t_b;
  out.residual = std::sqrt(misfit.squaredNorm() / static_cast<double>(t_a.rows()));
  out.condition = num::condition_number(out.L);
  return out;
}

// ---------------------------------------------------------------------------

TriangularMap fit_gaussian_kr(const MatrixXd& samples, const GaussianDistribution& target_prior) {
  const auto d = static_cast<Eigen::Index>(target_prior.dim());
  if (samples.cols() != d) throw DimensionMismatch("fit_gaussian_kr: sample dimension differs");
  if (samples.rows() < 10 * d) throw std::invalid_argument("fit_gaussian_kr: need n >= 10 d");
  const VectorXd mean = samples.colwise().mean().transpose();
  const MatrixXd c = samples.rowwise() - mean.transpose();
  MatrixXd cov = (c.transpose() * c) / static_cast<double>(samples.rows() - 1);
  cov = 0.5 * (cov + cov.transpose());
  return fit_gaussian_kr_moments(mean, cov, target_prior);
}

TriangularMap fit_gaussian_kr_moments(const VectorXd& mean, const MatrixXd& cov,
                                      const GaussianDistribution& target_prior) {
  auto fitted = std::make_shared<GaussianDistribution>(mean, cov);
  auto prior = std::make_shared<GaussianDistribution>(target_prior);
  return kr_transport(prior, fitted);
}

namespace {

// Piecewise linear interpolation through strictly increasing knots, extended
// linearly beyond both ends.
double interp(const std::vector<double>& xs, const std::vector<double>& ys, double v) {
  const std::size_t n = xs.size();
  std::size_t k;
  if (v <= xs.front()) k = 0;
  else if (v >= xs.back()) k = n - 2;
  else k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), v) - xs.begin()) - 1;
  const double t = (v - xs[k]) / (xs[k + 1] - xs[k]);
  return ys[k] + t * (ys[k + 1] - ys[k]);
}

void make_strict(std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] <= v[i - 1]) v[i] = v[i - 1] + 1e-12 * std::max(1.0, std::abs(v[i - 1]));
}

}  // namespace

TriangularMap fit_marginal_quantile_transport(const MatrixXd& samples,
                                              const ProductDistribution& target_prior,
                                              std::size_t grid_size) {
  const std::size_t d = target_prior.dim();
  if (static_cast<std::size_t>(samples.cols()) != d)
    throw DimensionMismatch("quantile transport: sample dimension differs");
  if (grid_size < 2) throw std::invalid_argument("quantile transport: grid_size must be >= 2");
  if (static_cast<std::size_t>(samples.rows()) < grid_size)
    throw std::invalid_argument("quantile transport: fewer samples than grid points");
  using Fn = TriangularMap::ComponentFn;
  std::vector<Fn> fwd, inv;
  const auto n = static_cast<std::size_t>(samples.rows());
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> s(n);
    for (std::size_t r = 0; r < n; ++r) s[r] = samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i));
    std::sort(s.begin(), s.end());
    std::vector<double> knots_z(grid_size), knots_x(grid_size);
    const auto& marginal = *target_prior.marginals()[i];
    for (std::size_t k = 0; k < grid_size; ++k) {
      const double p = (static_cast<double>(k) + 0.5) / static_cast<double>(grid_size);
      knots_z[k] = conditional_quantile(marginal, 0, VectorXd(), p);
      const double h = static_cast<double>(n - 1) * p;
      const auto lo = static_cast<std::size_t>(std::floor(h));
      const std::size_t hi = std::min(lo + 1, n - 1);
      knots_x[k] = s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
    }
    make_strict(knots_z);
    make_strict(knots_x);
    fwd.push_back([knots_z, knots_x](std::span<const double>, double z) { return interp(knots_z, knots_x, z); });
    inv.push_back([knots_z, knots_x](std::span<const double>, double x) { return interp(knots_x, knots_z, x); });
  }
  return TriangularMap::explicit_map("marginal_quantile", std::move(fwd), std::move(inv));
}

LinearGenerator fit_multi_env_affine(const std::vector<VectorXd>& x_means,
                                     const std::vector<VectorXd>& z_means) {
  if (x_means.size() != z_means.size() || x_means.empty())
    throw std::invalid_argument("fit_multi_env_affine: one latent mean per environment");
  const auto dz = z_means.front().size(), dx = x_means.front().size();
  const auto e = static_cast<Eigen::Index>(x_means.size());
  MatrixXd design(e, dz + 1), rhs(e, dx);
  for (Eigen::Index i = 0; i < e; ++i) {
    design(i, 0) = 1.0;
    design.row(i).tail(dz) = z_means[static_cast<std::size_t>(i)].transpose();
    rhs.row(i) = x_means[static_cast<std::size_t>(i)].transpose();
  }
  if (num::rank(design) < static_cast<std::size_t>(dz + 1))
    throw RankDeficient("environment means do not determine an affine generator");
  const MatrixXd coef = design.colPivHouseholderQr().solve(rhs);  // (1 + dz) x dx
  return LinearGenerator(coef.bottomRows(dz).transpose(), coef.row(0).transpose());
}

LearnedPriorFit fit_learned_prior_linear(const Dataset& data, Whitening gauge) {
  if (data.x.cols() != data.z.cols())
    throw DimensionMismatch("learned-prior fit needs d_x = d_z");
  const auto d = data.x.cols();
  const std::size_t n_env = data.env_labels.size();
  std::vector<VectorXd> means;
  MatrixXd within = MatrixXd::Zero(d, d);
  for (std::size_t e = 0; e < n_env; ++e) {
    const MatrixXd xe = data.x_of(e);
    const VectorXd m = xe.colwise().mean().transpose();
    const MatrixXd c = xe.rowwise() - m.transpose();
    within += c.transpose() * c;
    means.push_back(m);
  }
  within /= static_cast<double>(data.x.rows() - static_cast<Eigen::Index>(n_env));
  within = 0.5 * (within + within.transpose());
  MatrixXd w;
  if (gauge == Whitening::Cholesky) {
    Eigen::LLT<MatrixXd> llt(within);
    if (llt.info() != Eigen::Success) throw SingularCovariance("pooled covariance is singular");
    w = llt.matrixL().solve(MatrixXd::Identity(d, d));
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(within);
    if ((es.eigenvalues().array() <= 0.0).any())
      throw SingularCovariance("pooled covariance is singular");
    w = es.operatorInverseSqrt();
  }
  const VectorXd center = data.x.colwise().mean().transpose();
  const MatrixXd w_inv = w.inverse();
  LearnedPriorFit fit{LinearGenerator(w_inv, center), {}};
  for (const auto& m : means) fit.latent_means.push_back(w * (m - center));
  return fit;
}

// ---------------------------------------------------------------------------

MultiViewModel::MultiViewModel(std::vector<std::string> labels, std::vector<Generator> views)
    : labels_(std::move(labels)), views_(std::move(views)) {
  if (views_.empty() || labels_.size() != views_.size())
    throw std::invalid_argument("multiview model: one label per view");
  for (const auto& v : views_)
    if (v.latent_dim() != views_.front().latent_dim())
      throw DimensionMismatch("multiview model: views have different latent dims");
}

Json MultiViewReport::to_json() const {
  return Json{{"labels", labels},
              {"identity_sup_dev", identity_sup_dev},
              {"max_disagreement", max_disagreement},
              {"any_identity", any_identity},
              {"identified", identified},
              {"tol", tol}};
}

MultiViewReport verify_multiview(const MultiViewModel& model_a, const MultiViewModel& model_b,
                                 const Distribution& prior, std::size_t n, RngStream& rng,
                                 double tol) {
  if (model_a.labels() != model_b.labels())
    throw std::invalid_argument("verify_multiview: models have different view labels");
  if (model_a.latent_dim() != model_b.latent_dim() || prior.dim() != model_a.latent_dim())
    throw DimensionMismatch("verify_multiview: latent dims differ");
  const MatrixXd z = sample(prior, rng, n);
  MultiViewReport rep;
  rep.labels = model_a.labels();
  rep.tol = tol;
  std::vector<MatrixXd> images;
  for (std::size_t v = 0; v < model_a.views().size(); ++v) {
    const Automorphism a = generator_transform(model_a.views()[v], model_b.views()[v]);
    images.push_back(a.forward_rows(z));
    rep.identity_sup_dev.push_back((images.back() - z).lpNorm<Eigen::Infinity>());
  }
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j)
      rep.max_disagreement =
          std::max(rep.max_disagreement, (images[i] - images[j]).lpNorm<Eigen::Infinity>());
  rep.any_identity = std::any_of(rep.identity_sup_dev.begin(), rep.identity_sup_dev.end(),
                                 [tol](double v) { return v < tol; });
  rep.identified = rep.any_identity && rep.max_disagreement < tol;
  return rep;
}

}  // namespace idlab
