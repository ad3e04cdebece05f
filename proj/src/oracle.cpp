#include "graphmix/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace graphmix {

namespace {

void check_cap(const GraphSpace& space) {
  validate(space);
  if (space.max_edges() > kEnumerationCap)
    throw std::invalid_argument(
        "enumeration: space has more than 24 edge variables");
}

}  // namespace

std::uint32_t encode_graph(const Graph& g) {
  check_cap(g.space());
  const auto vars = edge_variables(g.space());
  std::uint32_t code = 0;
  for (std::size_t k = 0; k < vars.size(); ++k)
    if (g.edge(vars[k].first, vars[k].second)) code |= 1u << k;
  return code;
}

Graph decode_graph(const GraphSpace& space, std::uint32_t code) {
  check_cap(space);
  const auto vars = edge_variables(space);
  if (vars.size() < 32 && code >= (1u << vars.size()))
    throw std::invalid_argument("decode_graph: code outside the space");
  Graph g(space);
  for (std::size_t k = 0; k < vars.size(); ++k)
    if (code & (1u << k)) g.set_edge(vars[k].first, vars[k].second, true);
  return g;
}

void for_each_graph(const GraphSpace& space,
                    const std::function<void(const Graph&)>& fn) {
  check_cap(space);
  const auto vars = edge_variables(space);
  const std::uint32_t count = 1u << vars.size();
  Graph g(space);
  fn(g);
  for (std::uint32_t code = 1; code < count; ++code) {
    // Gray-style incremental update: flip exactly the bits that differ
    // from the previous code.
    const std::uint32_t changed = code ^ (code - 1);
    for (std::size_t k = 0; k < vars.size(); ++k)
      if (changed & (1u << k))
        g.set_edge(vars[k].first, vars[k].second, (code >> k) & 1u);
    fn(g);
  }
}

std::vector<Graph> enumerate_graphs(const GraphSpace& space) {
  check_cap(space);
  std::vector<Graph> out;
  out.reserve(1u << edge_variables(space).size());
  for_each_graph(space, [&](const Graph& g) { out.push_back(g); });
  return out;
}

EnumeratedDistribution exact_distribution(
    const GraphSpace& space,
    const std::function<double(const Graph&)>& log_pmf) {
  check_cap(space);
  EnumeratedDistribution dist{space, {}, 0.0};
  dist.prob.reserve(1u << edge_variables(space).size());
  for_each_graph(space, [&](const Graph& g) {
    dist.prob.push_back(std::exp(log_pmf(g)));
  });
  for (double p : dist.prob) dist.total += p;
  return dist;
}

EnumeratedDistribution exact_posterior(
    const GraphSpace& space,
    const std::function<double(const Graph&)>& log_prior,
    const ObservationSet& obs, double fp, double fn) {
  check_cap(space);
  validate(obs);
  if (!(obs.space == space))
    throw std::invalid_argument("exact_posterior: space mismatch");
  if (!(fp >= 0.0) || !(fp <= 1.0) || !(fn >= 0.0) || !(fn <= 1.0))
    throw std::domain_error("exact_posterior: rates must lie in [0,1]");

  // Aggregate integer report counts per cell first: the resulting
  // log-likelihood is independent of slice order bit for bit.
  const int n = space.n_vertices;
  const long long n_slices = static_cast<long long>(obs.slices.size());
  std::vector<long long> ones(static_cast<std::size_t>(n) * n, 0);
  for (const auto& slice : obs.slices)
    for (std::size_t c = 0; c < slice.size(); ++c) ones[c] += slice[c];

  // count * log(rate) with the 0 * log 0 = 0 convention so that
  // boundary rates poison only cells they actually touch.
  const auto xlog = [](long long count, double p) {
    if (count == 0) return 0.0;
    return static_cast<double>(count) * std::log(p);
  };

  std::vector<double> logw;
  logw.reserve(1u << edge_variables(space).size());
  for_each_graph(space, [&](const Graph& g) {
    double lw = log_prior(g);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const long long c1 = ones[static_cast<std::size_t>(i) * n + j];
        const long long c0 = n_slices - c1;
        if (g.edge(i, j))
          lw += xlog(c1, 1.0 - fn) + xlog(c0, fn);
        else
          lw += xlog(c1, fp) + xlog(c0, 1.0 - fp);
      }
    logw.push_back(lw);
  });

  const double mx = *std::max_element(logw.begin(), logw.end());
  if (mx == -std::numeric_limits<double>::infinity())
    throw NumericalError(
        "exact_posterior: observations impossible under every graph");
  double z = 0.0;
  for (double lw : logw) z += std::exp(lw - mx);
  EnumeratedDistribution dist{space, {}, 1.0};
  dist.prob.resize(logw.size());
  for (std::size_t k = 0; k < logw.size(); ++k)
    dist.prob[k] = std::exp(logw[k] - mx) / z;
  return dist;
}

std::vector<double> marginals(const EnumeratedDistribution& dist) {
  const auto vars = edge_variables(dist.space);
  std::vector<double> out(vars.size(), 0.0);
  for (std::size_t code = 0; code < dist.prob.size(); ++code)
    for (std::size_t k = 0; k < vars.size(); ++k)
      if (code & (1u << k)) out[k] += dist.prob[code];
  const double total = dist.total > 0.0 ? dist.total : 1.0;
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> edge_count_distribution(
    const EnumeratedDistribution& dist) {
  const auto vars = edge_variables(dist.space);
  std::vector<double> out(vars.size() + 1, 0.0);
  for (std::size_t code = 0; code < dist.prob.size(); ++code)
    out[std::popcount(static_cast<std::uint32_t>(code))] += dist.prob[code];
  const double total = dist.total > 0.0 ? dist.total : 1.0;
  for (double& v : out) v /= total;
  return out;
}

}  // namespace graphmix
