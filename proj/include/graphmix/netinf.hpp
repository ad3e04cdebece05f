#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphmix/graph.hpp"
#include "graphmix/models.hpp"
#include "graphmix/rng.hpp"

// Bayesian recovery of an unobserved criterion graph from multiple
// error-prone reports of its full adjacency structure.  Each report
// ("slice") flips true edges off with probability fn and reports absent
// edges with probability fp.  The criterion graph carries a pluggable
// prior; error rates get conjugate beta updates.

namespace graphmix {

// One binary report per slice, same shape as the adjacency matrix.
struct ObservationSet {
  GraphSpace space;
  // slices[k][i * n + j] is slice k's report on cell (i, j).
  std::vector<std::vector<std::uint8_t>> slices;
};

void validate(const ObservationSet& obs);

// Keeps the first n_slices slices.
ObservationSet truncate(const ObservationSet& obs, std::size_t n_slices);

// Beta hyperparameters for the false-positive and false-negative rates
// and the pooling mode: one shared rate pair, or one pair per slice.
struct ErrorModel {
  double fp_a = 1.0, fp_b = 11.0;
  double fn_a = 1.0, fn_b = 11.0;
  enum class Pooling { global, per_source };
  Pooling pooling = Pooling::global;
};

struct GraphPrior {
  enum class Family { bernoulli, beta_bernoulli, dirichlet_categorical };
  Family family = Family::bernoulli;
  BernoulliParams bernoulli;
  BetaBernoulliParams bb;
  DirichletCategoricalParams dc;

  std::string name() const;  // e.g. "beta-bernoulli(0.5,0.5)"
};

struct GibbsConfig {
  int chains = 3;
  int burn_in = 100;
  int draws = 100;  // retained per chain
  int thin = 1;
  // When set, error rates stay fixed at these values instead of being
  // resampled (degenerate error priors).
  std::optional<std::pair<double, double>> fixed_rates;
  std::uint64_t seed = 0;
};

// Post-burn-in draws only; rate vectors have one entry under global
// pooling and one per slice under per-source pooling.
struct ChainDraws {
  std::vector<Graph> graphs;
  std::vector<std::vector<double>> fp;
  std::vector<std::vector<double>> fn;
  std::vector<double> density;  // e(y)/e* per draw, for diagnostics
};

struct PosteriorDraws {
  GraphSpace space;
  std::vector<ChainDraws> chains;
  int burn_in = 0;
  int thin = 1;
};

// Inverts the dyad-rate moments: density = m + a/2 and reciprocity
// 2m/(2m+a) give m = d*r, a = 2d(1-r), n = 1 - m - a.
UmanParams uman_from_density_reciprocity(double density, double reciprocity);

// Independent per-cell reporting errors applied to the criterion.
ObservationSet simulate_css(const Graph& criterion, double fp, double fn,
                            int n_slices, Rng& rng);

// Systematic-scan Gibbs over the criterion graph and (unless fixed)
// conjugate updates of the error rates.  One iteration = one full sweep
// over edge variables (or dyads for the dyadic prior) plus one rate
// update.  Chains use independent derived streams.
PosteriorDraws posterior_gibbs(const ObservationSet& obs,
                               const GraphPrior& prior, const ErrorModel& em,
                               const GibbsConfig& config);

// Edgewise marginal mode: edge present when pooled Pr(edge) > 1/2;
// exact ties resolve to absent.
Graph point_estimate(const PosteriorDraws& draws);

// Pooled per-edge posterior inclusion frequencies, indexed like
// edge_variables(space).
std::vector<double> edge_marginals(const PosteriorDraws& draws);

// Fraction of edge variables on which the two graphs agree.
double hamming_accuracy(const Graph& est, const Graph& criterion);

// Gelman-Rubin potential scale reduction factor over >= 2 equal-length
// chains: sqrt((n-1)/n + B/(n W)).
double psrf(const std::vector<std::vector<double>>& chains);

// Mean posterior density over all retained draws.
double posterior_density_summary(const PosteriorDraws& draws);

// Crossed or explicit-pair experiment design over criterion-graph
// conditions, priors, and observation counts.
struct ExperimentDesign {
  int n_vertices = 0;
  std::vector<std::pair<double, double>> conditions;  // (density, reciprocity)
  int n_criterion = 0;
  double fp_rate = 0.0, fn_rate = 0.0;
  std::vector<int> slice_schedule;  // non-decreasing
  std::vector<GraphPrior> priors;
  ErrorModel error_model;
  GibbsConfig gibbs;  // per-run chain settings; seed field unused here
};

void validate(const ExperimentDesign& design);

struct ExperimentRow {
  double density = 0.0, reciprocity = 0.0;
  std::string prior;
  int n_slices = 0, replicate = 0;
  double accuracy = 0.0, inferred_density = 0.0;
  double psrf_density = 0.0;
  std::optional<double> psrf_fp, psrf_fn;  // absent with fixed rates
};

// For every condition, draws n_criterion criterion graphs, simulates
// max(slice_schedule) slices once per replicate, and runs every
// (prior, n_slices) cell on truncations of that observation set.
// Deterministic for a given seed regardless of worker scheduling.
std::vector<ExperimentRow> run_experiment(const ExperimentDesign& design,
                                          std::uint64_t seed);

}  // namespace graphmix
