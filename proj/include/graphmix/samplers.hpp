#pragma once

#include <vector>

#include "graphmix/graph.hpp"
#include "graphmix/models.hpp"
#include "graphmix/rng.hpp"

// Exact samplers for every model family plus the round-based contagion
// dynamics.  The two-stage mixture samplers draw the latent rate(s)
// first and then fill edges independently, so consecutive calls are
// independent draws from the marginal pmf.

namespace graphmix {

// Independent edges with probability delta; accepts the closed
// interval [0, 1] so degenerate corners stay usable.
Graph sample_bernoulli_graph(const GraphSpace& space, const BernoulliParams& p,
                             Rng& rng);

// Uniform over graphs with exactly e edges, via a partial shuffle of
// the edge-variable list.
Graph sample_cug(const GraphSpace& space, long long e, Rng& rng);

// Independent dyads with state probabilities (m, a, n); asymmetric
// dyads orient uniformly.  Directed loopless spaces only.
Graph sample_uman(const GraphSpace& space, const UmanParams& p, Rng& rng);

struct BetaBernoulliDraw {
  Graph graph;
  double delta_used;  // latent density drawn from Beta(alpha, beta)
};
BetaBernoulliDraw sample_beta_bernoulli(const GraphSpace& space,
                                        const BetaBernoulliParams& p,
                                        Rng& rng);

struct DirichletCategoricalDraw {
  Graph graph;
  double m_used, a_used, n_used;  // latent rates from Dirichlet(a, b, g)
};
DirichletCategoricalDraw sample_dirichlet_categorical(
    const GraphSpace& space, const DirichletCategoricalParams& p, Rng& rng);

// Trace of graph-level indices recorded every `thin` rounds, starting
// with the initial state; length = floor(rounds / thin) + 1.
struct ContagionTrace {
  std::vector<long long> step_index;
  std::vector<GliRecord> gli;
  Graph final_graph;
};

// Round-based tie dynamics: each round one ordered pair (i, j), i != j,
// is chosen uniformly and the tie is redrawn from the beta-Bernoulli
// full conditional of the current state.  This is single-site Gibbs, so
// the long-run distribution is the beta-Bernoulli pmf itself.
ContagionTrace run_contagion(const Graph& y0, const BetaBernoulliParams& p,
                             long long rounds, long long thin, Rng& rng);

// One systematic sweep over all edge variables, each redrawn from the
// Dirichlet-categorical full conditional.  In-place.
void gibbs_sweep_dc(Graph& y, const DirichletCategoricalParams& p, Rng& rng);

}  // namespace graphmix
