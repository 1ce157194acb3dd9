#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "idlab/indeterminacy.hpp"
#include "idlab/model.hpp"

namespace idlab {

/// A task (s, t): a selection function producing latents from observations
/// and an evaluation producing the task output. Outputs of any shape are
/// carried as matrices (a scalar is 1 x 1).
struct TaskSpec {
  using SelectFn = std::function<MatrixXd(const ModelParams&, const MatrixXd& obs)>;
  using EvaluateFn =
      std::function<MatrixXd(const ModelParams&, const MatrixXd& obs, const MatrixXd& latents)>;
  using MetricFn = std::function<double(const MatrixXd&, const MatrixXd&)>;

  std::string name;
  SelectFn select;
  EvaluateFn evaluate;
  MetricFn output_metric;

  MatrixXd run(const ModelParams& theta, const MatrixXd& obs) const;
};

/// Max over rows of the Euclidean distance between corresponding rows.
double max_row_distance(const MatrixXd& a, const MatrixXd& b);

struct TaskCheckOptions {
  /// true: each transform must preserve theta's prior. false: the prior is
  /// learned, so A_# P is checked against the prior of A theta instead.
  bool prior_fixed = true;
  std::size_t verify_n = 2000;
  double alpha = 0.01;
};

struct TaskReport {
  std::string task;
  std::vector<std::string> transforms;
  std::vector<double> distances;
  std::vector<CheckReport> certifications;
  double max_distance = 0.0;
  bool identifiable = false;
  double tol = 0.0;
  Json to_json() const;
};

/// Evaluates the task on theta and on A theta for each transform. Throws
/// UncertifiedTransform when a transform fails the prior re-verification.
TaskReport task_identifiability_check(const TaskSpec& task, const ModelParams& theta,
                                      const std::vector<Automorphism>& transforms,
                                      const MatrixXd& obs, double tol, RngStream& rng,
                                      const TaskCheckOptions& opts = {});

/// t = f(delta e_k + f^{-1}(x)).
TaskSpec latent_shift_task(double delta, std::size_t k);
/// |Spearman rho| between obs column j and latent column k.
TaskSpec independence_test_task(std::size_t obs_coord, std::size_t latent_coord, std::size_t n);
/// t = f(c) for a fixed latent point c.
TaskSpec constant_point_task(const VectorXd& c);

/// Spearman rank correlation with midranks for ties. Sums are taken over
/// integer (doubled) ranks, so the value is an exact function of the rank
/// pattern.
double spearman_rho(const VectorXd& a, const VectorXd& b);
/// Two-sided permutation p-value of |rho|, with the +1 correction.
double spearman_permutation_pvalue(const VectorXd& a, const VectorXd& b, std::size_t permutations,
                                   RngStream& rng);

}  // namespace idlab
