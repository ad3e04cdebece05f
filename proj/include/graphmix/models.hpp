#pragma once

#include <limits>
#include <stdexcept>
#include <string>

#include "graphmix/graph.hpp"

// Model families over binary graphs.  Two continuous mixtures form the
// core: edges mixed over a beta-distributed density, and dyads mixed
// over Dirichlet-distributed mutual/asymmetric/null rates.  Both have
// closed-form marginal pmfs evaluated entirely in log space.

namespace graphmix {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

struct BernoulliParams {
  double delta = 0.5;  // edge probability, in (0,1)
};

struct BetaBernoulliParams {
  double alpha = 1.0;
  double beta = 1.0;
};

struct DirichletCategoricalParams {
  double alpha = 1.0;  // mutual weight
  double beta = 1.0;   // asymmetric weight
  double gamma = 1.0;  // null weight
};

struct UmanParams {
  double m = 0.0;
  double a = 0.0;
  double n = 1.0;  // m + a + n = 1 within 1e-12
};

// Target moments of the mean degree; maps onto (alpha, beta) for a
// given space size.
struct MeanDegreeParams {
  double mu_d = 0.0;
  double sigma_d = 0.0;
};

// Target moments of the non-null degree plus the reciprocation rate r,
// the probability that a non-null dyad is mutual; maps onto
// (alpha, beta, gamma).
struct NonNullDegreeParams {
  double mu_nnd = 0.0;
  double r = 0.5;
  double sigma_nnd = 0.0;
};

void validate(const BernoulliParams& p);
void validate(const BetaBernoulliParams& p);
void validate(const DirichletCategoricalParams& p);
void validate(const UmanParams& p);

// Raised when requested density moments are not achievable by any
// parameter point (variance at or above the Bernoulli bound).  When
// triggered by one graph of a multi-graph set, graph_index names it;
// otherwise graph_index is -1.
class InvalidDispersionError : public std::domain_error {
 public:
  explicit InvalidDispersionError(const std::string& what, int index = -1)
      : std::domain_error(what), graph_index(index) {}
  int graph_index;
};

// Raised on numerical failures that valid inputs can still produce:
// contradictory noiseless observations, impossible posteriors, and the
// like.  The CLI maps this to its numerical-failure exit status.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- log pmfs ----

// Independent edges with common probability delta.
double log_pmf_bernoulli(const Graph& g, const BernoulliParams& p);

// Uniform over all graphs with exactly e edges; off-support graphs get
// -infinity.
double log_pmf_cug(const Graph& g, long long e);

// Independent dyads with state probabilities (m, a, n); each
// asymmetric dyad orients either way with probability 1/2.  Directed
// loopless spaces only.  Zero probabilities follow the 0*log(0) = 0
// convention.
double log_pmf_uman(const Graph& g, const UmanParams& p);
double log_pmf_uman_census(const DyadCensus& c, const UmanParams& p);

// Edge-count marginal family: density mixed over Beta(alpha, beta).
// Any space shape; only (e, e*) matter.
double log_pmf_beta_bernoulli(const Graph& g, const BetaBernoulliParams& p);
double log_pmf_bb_counts(long long e, long long e_max,
                         const BetaBernoulliParams& p);

// Dyad-census marginal family: (m, a, n) mixed over
// Dirichlet(alpha, beta, gamma).  Directed loopless spaces only.
double log_pmf_dirichlet_categorical(const Graph& g,
                                     const DirichletCategoricalParams& p);
double log_pmf_dc_census(const DyadCensus& c,
                         const DirichletCategoricalParams& p);

// ---- full conditionals ----

// Pr(edge present | all other edge variables) for the beta-Bernoulli
// family: (e_rest + alpha) / (e* - 1 + alpha + beta).  Equal to the
// pmf ratio by cancellation of every shared gamma term.
double cond_edge_prob_bb(long long e_rest, const GraphSpace& space,
                         const BetaBernoulliParams& p);

// Pr(y_ij = 1 | y_ji, all other dyads) for the Dirichlet-categorical
// family.  census_rest counts the other D*-1 dyads.  Computed from the
// log-pmf ratio of the two completions of the focal dyad.
double cond_edge_prob_dc(const DyadCensus& census_rest, bool y_ji,
                         const DirichletCategoricalParams& p);

// Unnormalized full-conditional weights of the four states of one dyad
// (mutual, asym i->j, asym j->i, null) given the census of the others.
// Proportional to the pmf of the completed graph:
// (M+alpha, (A+beta)/2, (A+beta)/2, N+gamma).
struct DyadStateWeights {
  double mutual;
  double asym_fwd;
  double asym_rev;
  double null;
};
DyadStateWeights dyad_state_weights(const DyadCensus& census_rest,
                                    const DirichletCategoricalParams& p);

// ---- reparameterizations ----

// Solves for (alpha, beta) hitting a target mean and standard
// deviation of the mean degree on the given space.
BetaBernoulliParams params_from_mean_degree(const MeanDegreeParams& md,
                                            const GraphSpace& space);

// Solves for (alpha, beta, gamma) hitting target non-null degree
// moments and reciprocation rate r = alpha/(alpha+beta).
DirichletCategoricalParams params_from_nnd(const NonNullDegreeParams& nn,
                                           const GraphSpace& space);

// ---- moments ----

struct BetaBernoulliMoments {
  double mean_density;
  double var_density;
  double mean_degree;
  double sd_degree;
};
BetaBernoulliMoments moments(const BetaBernoulliParams& p,
                             const GraphSpace& space);

struct DirichletCategoricalMoments {
  double mean_m;
  double mean_a;
  double mean_n;
  double mean_density;        // E m + E a / 2
  double reciprocation_rate;  // alpha / (alpha + beta)
};
DirichletCategoricalMoments moments(const DirichletCategoricalParams& p);

struct UmanMoments {
  double density;               // m + a/2
  double edgewise_reciprocity;  // 2m / (2m + a)
};
UmanMoments moments(const UmanParams& p);

}  // namespace graphmix
