#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "graphmix/graph.hpp"
#include "graphmix/netinf.hpp"

// Brute-force enumeration over small graph spaces.  Graphs are encoded
// as e*-bit integers where bit k holds edge variable k in lexicographic
// order; the hard cap is e* <= 24.

namespace graphmix {

inline constexpr long long kEnumerationCap = 24;

std::uint32_t encode_graph(const Graph& g);
Graph decode_graph(const GraphSpace& space, std::uint32_t code);

// Calls fn once per support member, in encoding order.
void for_each_graph(const GraphSpace& space,
                    const std::function<void(const Graph&)>& fn);

// Materialized variant of for_each_graph.
std::vector<Graph> enumerate_graphs(const GraphSpace& space);

// prob[code] for every graph in the space.  total reports the raw sum
// before any normalization.
struct EnumeratedDistribution {
  GraphSpace space;
  std::vector<double> prob;
  double total = 0.0;
};

// Exponentiates a log pmf over the whole space.  Entries are the raw
// exp(log_pmf) values; a correct pmf gives total == 1 within 1e-10.
EnumeratedDistribution exact_distribution(
    const GraphSpace& space,
    const std::function<double(const Graph&)>& log_pmf);

// Exact posterior over criterion graphs given the observations and
// fixed error rates: prior pmf times per-cell report likelihoods,
// normalized by log-sum-exp.  total is 1 by construction.
EnumeratedDistribution exact_posterior(
    const GraphSpace& space,
    const std::function<double(const Graph&)>& log_prior,
    const ObservationSet& obs, double fp, double fn);

// Per-edge-variable inclusion probabilities of a distribution.
std::vector<double> marginals(const EnumeratedDistribution& dist);

// Distribution of the edge count implied by a distribution.
std::vector<double> edge_count_distribution(const EnumeratedDistribution& dist);

}  // namespace graphmix
