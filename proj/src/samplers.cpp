#include "graphmix/samplers.hpp"

#include <stdexcept>
#include <utility>

namespace graphmix {

namespace {

void require_dyadic(const GraphSpace& space, const char* op) {
  if (!space.directed || space.loops)
    throw std::invalid_argument(std::string(op) +
                                ": requires a directed loopless space");
}

// Removes the focal dyad's current state from the census.
void remove_dyad(DyadCensus& c, bool fwd, bool rev) {
  if (fwd && rev)
    --c.mutuals;
  else if (fwd || rev)
    --c.asymmetrics;
  else
    --c.nulls;
}

void add_dyad(DyadCensus& c, bool fwd, bool rev) {
  if (fwd && rev)
    ++c.mutuals;
  else if (fwd || rev)
    ++c.asymmetrics;
  else
    ++c.nulls;
}

}  // namespace

Graph sample_bernoulli_graph(const GraphSpace& space, const BernoulliParams& p,
                             Rng& rng) {
  if (!(p.delta >= 0.0) || !(p.delta <= 1.0))
    throw std::domain_error("sample_bernoulli_graph: delta must lie in [0,1]");
  Graph g(space);
  for (const auto& [i, j] : edge_variables(space))
    if (rng.bernoulli(p.delta)) g.set_edge(i, j, true);
  return g;
}

Graph sample_cug(const GraphSpace& space, long long e, Rng& rng) {
  auto vars = edge_variables(space);
  const long long e_max = static_cast<long long>(vars.size());
  if (e < 0 || e > e_max)
    throw std::domain_error("sample_cug: edge count outside [0, e*]");
  Graph g(space);
  // Partial Fisher-Yates: the first e entries become a uniform e-subset.
  for (long long t = 0; t < e; ++t) {
    const long long pick =
        t + static_cast<long long>(rng.uniform_int(
                static_cast<std::uint64_t>(e_max - t)));
    std::swap(vars[t], vars[pick]);
    g.set_edge(vars[t].first, vars[t].second, true);
  }
  return g;
}

Graph sample_uman(const GraphSpace& space, const UmanParams& p, Rng& rng) {
  require_dyadic(space, "sample_uman");
  validate(p);
  Graph g(space);
  for (int i = 0; i < space.n_vertices; ++i) {
    for (int j = i + 1; j < space.n_vertices; ++j) {
      const double u = rng.uniform();
      if (u < p.m) {
        g.set_edge(i, j, true);
        g.set_edge(j, i, true);
      } else if (u < p.m + p.a) {
        if (rng.bernoulli(0.5))
          g.set_edge(i, j, true);
        else
          g.set_edge(j, i, true);
      }
    }
  }
  return g;
}

BetaBernoulliDraw sample_beta_bernoulli(const GraphSpace& space,
                                        const BetaBernoulliParams& p,
                                        Rng& rng) {
  validate(p);
  const double delta = rng.beta(p.alpha, p.beta);
  return {sample_bernoulli_graph(space, {delta}, rng), delta};
}

DirichletCategoricalDraw sample_dirichlet_categorical(
    const GraphSpace& space, const DirichletCategoricalParams& p, Rng& rng) {
  require_dyadic(space, "sample_dirichlet_categorical");
  validate(p);
  const double alpha[3] = {p.alpha, p.beta, p.gamma};
  double rates[3];
  rng.dirichlet(alpha, 3, rates);
  Graph g = sample_uman(space, {rates[0], rates[1], rates[2]}, rng);
  return {std::move(g), rates[0], rates[1], rates[2]};
}

ContagionTrace run_contagion(const Graph& y0, const BetaBernoulliParams& p,
                             long long rounds, long long thin, Rng& rng) {
  const GraphSpace& space = y0.space();
  if (!space.directed)
    throw std::invalid_argument("run_contagion: requires a directed space");
  if (space.n_vertices < 2)
    throw std::invalid_argument(
        "run_contagion: need at least two vertices to pick a pair");
  if (rounds < 0 || thin < 1)
    throw std::invalid_argument("run_contagion: need rounds >= 0, thin >= 1");
  validate(p);

  const int n = space.n_vertices;
  Graph y = y0;
  ContagionTrace trace{{0}, {graph_level_indices(y)}, y};
  for (long long t = 1; t <= rounds; ++t) {
    const int i = static_cast<int>(rng.uniform_int(n));
    int j = static_cast<int>(rng.uniform_int(n - 1));
    if (j >= i) ++j;  // uniform over ordered pairs with i != j
    const long long e_rest = y.edge_count() - (y.edge(i, j) ? 1 : 0);
    const double prob = cond_edge_prob_bb(e_rest, space, p);
    y.set_edge(i, j, rng.uniform() < prob);
    if (t % thin == 0) {
      trace.step_index.push_back(t);
      trace.gli.push_back(graph_level_indices(y));
    }
  }
  trace.final_graph = y;
  return trace;
}

void gibbs_sweep_dc(Graph& y, const DirichletCategoricalParams& p, Rng& rng) {
  require_dyadic(y.space(), "gibbs_sweep_dc");
  validate(p);
  DyadCensus census = dyad_census(y);
  for (const auto& [i, j] : edge_variables(y.space())) {
    const bool fwd = y.edge(i, j);
    const bool rev = y.edge(j, i);
    DyadCensus rest = census;
    remove_dyad(rest, fwd, rev);
    const double prob = cond_edge_prob_dc(rest, rev, p);
    const bool new_fwd = rng.uniform() < prob;
    if (new_fwd != fwd) {
      y.set_edge(i, j, new_fwd);
      census = rest;
      add_dyad(census, new_fwd, rev);
    }
  }
}

}  // namespace graphmix
