#include "idlab/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "idlab/errors.hpp"

namespace idlab {

MatrixXd TaskSpec::run(const ModelParams& theta, const MatrixXd& obs) const {
  return evaluate(theta, obs, select(theta, obs));
}

double max_row_distance(const MatrixXd& a, const MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("task outputs have different shapes");
  if (a.size() == 0) return 0.0;
  return (a - b).rowwise().norm().maxCoeff();
}

Json TaskReport::to_json() const {
  Json certs = Json::array();
  for (const auto& c : certifications) certs.push_back(c.to_json());
  return Json{{"task", task},
              {"transforms", transforms},
              {"distances", distances},
              {"max_distance", max_distance},
              {"identifiable", identifiable},
              {"tol", tol},
              {"certifications", certs}};
}

TaskReport task_identifiability_check(const TaskSpec& task, const ModelParams& theta,
                                      const std::vector<Automorphism>& transforms,
                                      const MatrixXd& obs, double tol, RngStream& rng,
                                      const TaskCheckOptions& opts) {
  TaskReport rep;
  rep.task = task.name;
  rep.tol = tol;
  const MatrixXd base = task.run(theta, obs);
  for (std::size_t i = 0; i < transforms.size(); ++i) {
    const auto& a = transforms[i];
    const ModelParams moved = act_on_params(a, theta);
    RngStream check_rng = rng.child(i);
    const Distribution& target = opts.prior_fixed ? *theta.prior : *moved.prior;
    CheckReport cert = pushforward_check(a, *theta.prior, target, opts.verify_n, check_rng, opts.alpha);
    if (!cert.pass)
      throw UncertifiedTransform("transform '" + a.name() + "' fails the prior re-verification");
    const double dist = task.output_metric(base, task.run(moved, obs));
    rep.transforms.push_back(a.name());
    rep.distances.push_back(dist);
    rep.certifications.push_back(std::move(cert));
    rep.max_distance = std::max(rep.max_distance, dist);
  }
  rep.identifiable = rep.max_distance < tol;
  return rep;
}

namespace {

MatrixXd invert_rows(const ModelParams& theta, const MatrixXd& obs) {
  return theta.generator.inverse_rows(obs);
}

}  // namespace

TaskSpec latent_shift_task(double delta, std::size_t k) {
  TaskSpec t;
  t.name = "latent_shift";
  t.select = invert_rows;
  t.evaluate = [delta, k](const ModelParams& theta, const MatrixXd&, const MatrixXd& latents) {
    if (k >= theta.generator.latent_dim()) throw std::invalid_argument("latent shift: bad coordinate");
    MatrixXd shifted = latents;
    shifted.col(static_cast<Eigen::Index>(k)).array() += delta;
    return theta.generator.forward_rows(shifted);
  };
  t.output_metric = max_row_distance;
  return t;
}

TaskSpec independence_test_task(std::size_t obs_coord, std::size_t latent_coord, std::size_t n) {
  if (n < 30) throw std::invalid_argument("independence task: need n >= 30");
  TaskSpec t;
  t.name = "independence_test";
  t.select = invert_rows;
  t.evaluate = [obs_coord, latent_coord, n](const ModelParams&, const MatrixXd& obs,
                                            const MatrixXd& latents) {
    if (static_cast<std::size_t>(obs.rows()) < n)
      throw std::invalid_argument("independence task: fewer observations than n");
    const auto rows = static_cast<Eigen::Index>(n);
    MatrixXd out(1, 1);
    out(0, 0) = std::abs(spearman_rho(obs.col(static_cast<Eigen::Index>(obs_coord)).head(rows),
                                      latents.col(static_cast<Eigen::Index>(latent_coord)).head(rows)));
    return out;
  };
  t.output_metric = [](const MatrixXd& a, const MatrixXd& b) { return std::abs(a(0, 0) - b(0, 0)); };
  return t;
}

TaskSpec constant_point_task(const VectorXd& c) {
  TaskSpec t;
  t.name = "constant_point";
  t.select = [c](const ModelParams&, const MatrixXd&) { return MatrixXd(c.transpose()); };
  t.evaluate = [](const ModelParams& theta, const MatrixXd&, const MatrixXd& latents) {
    return theta.generator.forward_rows(latents);
  };
  t.output_metric = max_row_distance;
  return t;
}

namespace {

// Twice the midrank of each entry, as integers.
std::vector<std::int64_t> doubled_ranks(const VectorXd& v) {
  const auto n = static_cast<std::size_t>(v.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&v](std::size_t a, std::size_t b) {
    return v(static_cast<Eigen::Index>(a)) < v(static_cast<Eigen::Index>(b));
  });
  std::vector<std::int64_t> r(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v(static_cast<Eigen::Index>(order[j + 1])) == v(static_cast<Eigen::Index>(order[i]))) ++j;
    // ranks i+1..j+1 share the midrank (i + j + 2) / 2
    const auto twice = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = twice;
    i = j + 1;
  }
  return r;
}

double rho_from_ranks(const std::vector<std::int64_t>& ra, const std::vector<std::int64_t>& rb) {
  const auto n = static_cast<__int128>(ra.size());
  __int128 sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sa += ra[i];
    sb += rb[i];
    saa += static_cast<__int128>(ra[i]) * ra[i];
    sbb += static_cast<__int128>(rb[i]) * rb[i];
    sab += static_cast<__int128>(ra[i]) * rb[i];
  }
  const __int128 cov = n * sab - sa * sb;
  const __int128 va = n * saa - sa * sa;
  const __int128 vb = n * sbb - sb * sb;
  if (va == 0 || vb == 0) return 0.0;
  return static_cast<double>(static_cast<long double>(cov) /
                             std::sqrt(static_cast<long double>(va) * static_cast<long double>(vb)));
}

}  // namespace

double spearman_rho(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw DimensionMismatch("spearman_rho: need two equal-length samples");
  return rho_from_ranks(doubled_ranks(a), doubled_ranks(b));
}

double spearman_permutation_pvalue(const VectorXd& a, const VectorXd& b, std::size_t permutations,
                                   RngStream& rng) {
  if (permutations == 0) throw std::invalid_argument("permutation test: need permutations");
  const auto ra = doubled_ranks(a);
  auto rb = doubled_ranks(b);
  const double observed = std::abs(rho_from_ranks(ra, rb));
  std::size_t exceed = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    std::shuffle(rb.begin(), rb.end(), rng);
    if (std::abs(rho_from_ranks(ra, rb)) >= observed) ++exceed;
  }
  return static_cast<double>(exceed + 1) / static_cast<double>(permutations + 1);
}

}  // namespace idlab
