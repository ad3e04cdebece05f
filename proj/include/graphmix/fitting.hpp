#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphmix/graph.hpp"
#include "graphmix/models.hpp"

// Pooled likelihood fitting across a collection of independently drawn
// graphs.  Estimation maximizes the exact pooled log-likelihood on an
// unconstrained transform of the parameters; the offset-approximate
// families share the machinery but restrict to the region where the
// log-gamma offset form is valid (parameters above 1).

namespace graphmix {

struct GraphSet {
  std::vector<Graph> graphs;  // same directedness and loop policy
};

void validate(const GraphSet& gs);

// Order-insensitive content hash used to detect comparisons across
// different data.
std::uint64_t graphset_fingerprint(const GraphSet& gs);

enum class Family {
  bernoulli,
  beta_bernoulli,
  dirichlet_categorical,
  beta_bernoulli_meandeg,
  dc_nnd,
};

std::string family_name(Family f);
std::optional<Family> family_from_name(const std::string& name);

// ---- exact pooled log-likelihoods ----

double pooled_loglik(const GraphSet& gs, const BernoulliParams& p);
double pooled_loglik(const GraphSet& gs, const BetaBernoulliParams& p);
double pooled_loglik(const GraphSet& gs, const DirichletCategoricalParams& p);
// Reparameterized families map the shared moment parameters through
// each graph's own vertex count before evaluation.
double pooled_loglik(const GraphSet& gs, const MeanDegreeParams& p);
double pooled_loglik(const GraphSet& gs, const NonNullDegreeParams& p);

// ---- offset-approximate pooled potential ----
// Unnormalized: fixed log-gamma offsets of the sufficient statistics
// plus parameter-linear terms.  Valid for alpha, beta >= 1 (edge
// family) and alpha, beta, gamma > 1 (dyadic family); every statistic
// whose log is taken must be strictly positive.

double pooled_loglik_offset_approx(const GraphSet& gs,
                                   const BetaBernoulliParams& p);
double pooled_loglik_offset_approx(const GraphSet& gs,
                                   const DirichletCategoricalParams& p);

// ---- analytic gradients of the exact pooled log-likelihoods ----

std::vector<double> grad_pooled_loglik(const GraphSet& gs,
                                       const BetaBernoulliParams& p);
std::vector<double> grad_pooled_loglik(const GraphSet& gs,
                                       const DirichletCategoricalParams& p);
std::vector<double> grad_pooled_loglik(const GraphSet& gs,
                                       const MeanDegreeParams& p);
std::vector<double> grad_pooled_loglik(const GraphSet& gs,
                                       const NonNullDegreeParams& p);

// ---- identifiability ----

struct IdentifiabilityReport {
  bool ok = false;
  std::string reason;  // empty when ok
};

IdentifiabilityReport identifiability_check(const GraphSet& gs, Family family);

// ---- maximum likelihood ----

struct FitConfig {
  int max_iter = 500;
  double grad_tol = 1e-6;      // transformed-scale convergence threshold
  double transform_cap = 30.0;  // |u| bound on each transformed parameter
  bool offset_transform = false;  // use log(theta - 1), restricting theta > 1
};

struct FitResult {
  std::string family;
  std::vector<std::string> param_names;
  std::vector<double> estimates;   // natural scale; empty when degenerate
  std::vector<double> std_errors;  // natural scale, delta method
  std::string scale;               // "identity", "log", or "log-minus-one"
  double log_likelihood = 0.0;
  double deviance = 0.0;
  double null_deviance = 0.0;
  double aic = 0.0;
  bool converged = false;
  std::vector<std::string> flags;
  std::optional<std::string> degenerate;
  int n_params = 0;
  long long residual_df = 0;  // sum of e*_i minus n_params
  std::uint64_t data_fingerprint = 0;
};

FitResult fit_mle(const GraphSet& gs, Family family,
                  const FitConfig& config = {});

// ---- model comparison ----

struct ComparisonRow {
  std::string family;
  double deviance = 0.0;
  long long df = 0;
  double aic = 0.0;
};

// Rows sorted by ascending AIC; all fits must carry the same data
// fingerprint.
std::vector<ComparisonRow> model_comparison(
    const std::vector<FitResult>& fits);

}  // namespace graphmix
