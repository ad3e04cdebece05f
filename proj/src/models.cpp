#include "graphmix/models.hpp"

#include <cmath>

#include "graphmix/special.hpp"

namespace graphmix {

namespace {

constexpr double kLog2 = 0.69314718055994530942;

double xlogy(double x, double y) {
  if (x == 0.0) return 0.0;  // 0 * log 0 convention
  return x * std::log(y);
}

void require_dyadic(const Graph& g, const char* op) {
  if (!g.space().directed || g.space().loops)
    throw std::invalid_argument(std::string(op) +
                                ": requires a directed loopless space");
}

void check_census(const DyadCensus& c, const char* op) {
  if (c.mutuals < 0 || c.asymmetrics < 0 || c.nulls < 0)
    throw std::invalid_argument(std::string(op) + ": inconsistent census");
}

}  // namespace

void validate(const BernoulliParams& p) {
  if (!(p.delta > 0.0) || !(p.delta < 1.0))
    throw std::domain_error("BernoulliParams: delta must lie in (0,1)");
}

void validate(const BetaBernoulliParams& p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0))
    throw std::domain_error("BetaBernoulliParams: alpha, beta must be > 0");
}

void validate(const DirichletCategoricalParams& p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !(p.gamma > 0.0))
    throw std::domain_error(
        "DirichletCategoricalParams: alpha, beta, gamma must be > 0");
}

void validate(const UmanParams& p) {
  if (p.m < 0.0 || p.a < 0.0 || p.n < 0.0 || p.m > 1.0 || p.a > 1.0 ||
      p.n > 1.0 || std::fabs(p.m + p.a + p.n - 1.0) > 1e-12)
    throw std::domain_error("UmanParams: (m, a, n) must lie on the simplex");
}

double log_pmf_bernoulli(const Graph& g, const BernoulliParams& p) {
  validate(p);
  const double e = static_cast<double>(g.edge_count());
  const double n = static_cast<double>(g.space().max_edges() - g.edge_count());
  return e * std::log(p.delta) + n * std::log1p(-p.delta);
}

double log_pmf_cug(const Graph& g, long long e) {
  const long long e_max = g.space().max_edges();
  if (e < 0 || e > e_max)
    throw std::domain_error("log_pmf_cug: edge count outside [0, e*]");
  if (g.edge_count() != e) return kLogZero;
  return -log_choose(e_max, e);
}

double log_pmf_uman_census(const DyadCensus& c, const UmanParams& p) {
  validate(p);
  check_census(c, "log_pmf_uman");
  return -kLog2 * static_cast<double>(c.asymmetrics) +
         xlogy(static_cast<double>(c.mutuals), p.m) +
         xlogy(static_cast<double>(c.asymmetrics), p.a) +
         xlogy(static_cast<double>(c.nulls), p.n);
}

double log_pmf_uman(const Graph& g, const UmanParams& p) {
  require_dyadic(g, "log_pmf_uman");
  return log_pmf_uman_census(dyad_census(g), p);
}

double log_pmf_bb_counts(long long e, long long e_max,
                         const BetaBernoulliParams& p) {
  validate(p);
  if (e < 0 || e > e_max)
    throw std::domain_error("log_pmf_bb_counts: edge count outside [0, e*]");
  const double a = p.alpha, b = p.beta;
  return log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
         log_gamma(static_cast<double>(e) + a) +
         log_gamma(static_cast<double>(e_max - e) + b) -
         log_gamma(static_cast<double>(e_max) + a + b);
}

double log_pmf_beta_bernoulli(const Graph& g, const BetaBernoulliParams& p) {
  return log_pmf_bb_counts(g.edge_count(), g.space().max_edges(), p);
}

double log_pmf_dc_census(const DyadCensus& c,
                         const DirichletCategoricalParams& p) {
  validate(p);
  check_census(c, "log_pmf_dc_census");
  const double s = p.alpha + p.beta + p.gamma;
  const double d_star = static_cast<double>(c.mutuals + c.asymmetrics + c.nulls);
  return -kLog2 * static_cast<double>(c.asymmetrics) + log_gamma(s) -
         log_gamma(p.alpha) - log_gamma(p.beta) - log_gamma(p.gamma) +
         log_gamma(static_cast<double>(c.mutuals) + p.alpha) +
         log_gamma(static_cast<double>(c.asymmetrics) + p.beta) +
         log_gamma(static_cast<double>(c.nulls) + p.gamma) -
         log_gamma(d_star + s);
}

double log_pmf_dirichlet_categorical(const Graph& g,
                                     const DirichletCategoricalParams& p) {
  require_dyadic(g, "log_pmf_dirichlet_categorical");
  return log_pmf_dc_census(dyad_census(g), p);
}

double cond_edge_prob_bb(long long e_rest, const GraphSpace& space,
                         const BetaBernoulliParams& p) {
  validate(p);
  const long long e_max = space.max_edges();
  if (e_rest < 0 || e_rest > e_max - 1)
    throw std::domain_error("cond_edge_prob_bb: e_rest outside [0, e*-1]");
  return (static_cast<double>(e_rest) + p.alpha) /
         (static_cast<double>(e_max - 1) + p.alpha + p.beta);
}

double cond_edge_prob_dc(const DyadCensus& census_rest, bool y_ji,
                         const DirichletCategoricalParams& p) {
  validate(p);
  check_census(census_rest, "cond_edge_prob_dc");
  // The two completions of the focal dyad differ in exactly one census
  // cell; every term shared between their log pmfs cancels in the
  // ratio, so the unnormalized weights below are exact.
  DyadCensus with = census_rest, without = census_rest;
  if (y_ji) {
    ++with.mutuals;        // focal edge present: dyad becomes mutual
    ++without.asymmetrics; // absent: reverse arc alone
  } else {
    ++with.asymmetrics;
    ++without.nulls;
  }
  const double log_odds = log_pmf_dc_census(with, p) -
                          log_pmf_dc_census(without, p);
  return 1.0 / (1.0 + std::exp(-log_odds));
}

DyadStateWeights dyad_state_weights(const DyadCensus& census_rest,
                                    const DirichletCategoricalParams& p) {
  validate(p);
  check_census(census_rest, "dyad_state_weights");
  // Ratios of the completed-graph pmfs after cancelling shared terms;
  // the 1/2 on asymmetric states is the orientation factor.
  const double m = static_cast<double>(census_rest.mutuals) + p.alpha;
  const double a = 0.5 * (static_cast<double>(census_rest.asymmetrics) + p.beta);
  const double n = static_cast<double>(census_rest.nulls) + p.gamma;
  return {m, a, a, n};
}

BetaBernoulliParams params_from_mean_degree(const MeanDegreeParams& md,
                                            const GraphSpace& space) {
  validate(space);
  const double n1 = static_cast<double>(space.n_vertices - 1);
  if (!(md.mu_d > 0.0) || !(md.mu_d < n1))
    throw std::domain_error(
        "params_from_mean_degree: need 0 < mu_d < N_V - 1");
  if (!(md.sigma_d > 0.0))
    throw std::domain_error("params_from_mean_degree: need sigma_d > 0");
  const double q = md.mu_d / n1;              // mean density
  const double v = (md.sigma_d / n1) * (md.sigma_d / n1);
  if (!(v < q * (1.0 - q)))
    throw InvalidDispersionError(
        "params_from_mean_degree: sigma_d^2 must be below the Bernoulli "
        "bound mu_d * (N_V - 1 - mu_d) / (N_V - 1)");
  const double s = q * (1.0 - q) / v - 1.0;   // total concentration
  return {q * s, (1.0 - q) * s};
}

DirichletCategoricalParams params_from_nnd(const NonNullDegreeParams& nn,
                                           const GraphSpace& space) {
  validate(space);
  const double n1 = static_cast<double>(space.n_vertices - 1);
  if (!(nn.mu_nnd > 0.0) || !(nn.mu_nnd < n1))
    throw std::domain_error("params_from_nnd: need 0 < mu_nnd < N_V - 1");
  if (!(nn.r > 0.0) || !(nn.r < 1.0))
    throw std::domain_error("params_from_nnd: need 0 < r < 1");
  if (!(nn.sigma_nnd > 0.0))
    throw std::domain_error("params_from_nnd: need sigma_nnd > 0");
  const double spread = nn.mu_nnd * (n1 - nn.mu_nnd);
  if (!(spread > nn.sigma_nnd * nn.sigma_nnd))
    throw InvalidDispersionError(
        "params_from_nnd: sigma_nnd^2 must be below mu_nnd * "
        "(N_V - 1 - mu_nnd)");
  const double t =
      (spread - nn.sigma_nnd * nn.sigma_nnd) / (n1 * nn.sigma_nnd * nn.sigma_nnd);
  return {nn.r * nn.mu_nnd * t, (1.0 - nn.r) * nn.mu_nnd * t,
          (n1 - nn.mu_nnd) * t};
}

BetaBernoulliMoments moments(const BetaBernoulliParams& p,
                             const GraphSpace& space) {
  validate(p);
  validate(space);
  const double s = p.alpha + p.beta;
  const double mean = p.alpha / s;
  const double var = p.alpha * p.beta / (s * s * (s + 1.0));
  const double n1 = static_cast<double>(space.n_vertices - 1);
  return {mean, var, n1 * mean, n1 * std::sqrt(var)};
}

DirichletCategoricalMoments moments(const DirichletCategoricalParams& p) {
  validate(p);
  const double s = p.alpha + p.beta + p.gamma;
  const double m = p.alpha / s;
  const double a = p.beta / s;
  return {m, a, p.gamma / s, m + 0.5 * a, p.alpha / (p.alpha + p.beta)};
}

UmanMoments moments(const UmanParams& p) {
  validate(p);
  const double adjacent = 2.0 * p.m + p.a;
  return {p.m + 0.5 * p.a, adjacent > 0.0 ? 2.0 * p.m / adjacent : 0.0};
}

}  // namespace graphmix
