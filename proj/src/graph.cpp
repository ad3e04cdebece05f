#include "graphmix/graph.hpp"

#include <numeric>
#include <stdexcept>

namespace graphmix {

void validate(const GraphSpace& space) {
  if (space.n_vertices < 1)
    throw std::invalid_argument("GraphSpace: need at least one vertex");
}

long long GraphSpace::max_edges() const {
  const long long n = n_vertices;
  long long e = directed ? n * (n - 1) : n * (n - 1) / 2;
  if (loops) e += n;
  return e;
}

long long GraphSpace::max_dyads() const {
  if (!directed || loops)
    throw std::invalid_argument(
        "max_dyads: dyads are defined for directed loopless spaces");
  const long long n = n_vertices;
  return n * (n - 1) / 2;
}

std::vector<std::pair<int, int>> edge_variables(const GraphSpace& space) {
  validate(space);
  std::vector<std::pair<int, int>> vars;
  vars.reserve(static_cast<std::size_t>(space.max_edges()));
  for (int i = 0; i < space.n_vertices; ++i) {
    for (int j = space.directed ? 0 : i; j < space.n_vertices; ++j) {
      if (i == j && !space.loops) continue;
      vars.emplace_back(i, j);
    }
  }
  return vars;
}

Graph::Graph(const GraphSpace& space) : space_(space) {
  validate(space);
  adj_.assign(static_cast<std::size_t>(space.n_vertices) * space.n_vertices, 0);
}

long long Graph::cell(int i, int j) const {
  if (i < 0 || j < 0 || i >= space_.n_vertices || j >= space_.n_vertices)
    throw std::out_of_range("Graph: vertex index out of range");
  if (i == j && !space_.loops)
    throw std::invalid_argument("Graph: loops are not allowed in this space");
  return static_cast<long long>(i) * space_.n_vertices + j;
}

bool Graph::edge(int i, int j) const { return adj_[cell(i, j)] != 0; }

void Graph::set_edge(int i, int j, bool present) {
  const long long c = cell(i, j);
  if ((adj_[c] != 0) == present) return;
  adj_[c] = present ? 1 : 0;
  if (!space_.directed) adj_[static_cast<long long>(j) * space_.n_vertices + i] = adj_[c];
  edge_count_ += present ? 1 : -1;
}

DyadCensus dyad_census(const Graph& g) {
  const GraphSpace& sp = g.space();
  if (!sp.directed || sp.loops)
    throw std::invalid_argument(
        "dyad_census: defined for directed loopless graphs");
  DyadCensus c;
  for (int i = 0; i < sp.n_vertices; ++i) {
    for (int j = i + 1; j < sp.n_vertices; ++j) {
      const bool a = g.edge(i, j);
      const bool b = g.edge(j, i);
      if (a && b)
        ++c.mutuals;
      else if (a || b)
        ++c.asymmetrics;
      else
        ++c.nulls;
    }
  }
  return c;
}

namespace {

// Union-find over vertices; path halving keeps it near-linear.
struct Components {
  std::vector<int> parent;
  explicit Components(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[a] = b;
  }
};

}  // namespace

GliRecord graph_level_indices(const Graph& g) {
  const GraphSpace& sp = g.space();
  GliRecord r;
  const long long emax = sp.max_edges();
  r.density = emax > 0 ? static_cast<double>(g.edge_count()) / emax : 0.0;

  if (sp.directed && !sp.loops) {
    const DyadCensus c = dyad_census(g);
    const long long adjacent = 2 * c.mutuals + c.asymmetrics;
    if (adjacent > 0)
      r.reciprocity = static_cast<double>(2 * c.mutuals) / adjacent;
  }

  // Connectedness ignores direction and loops: union endpoints of every
  // edge, then count intra-component vertex pairs.
  const int n = sp.n_vertices;
  if (n < 2) {
    r.connectedness = 1.0;
    return r;
  }
  Components comp(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && g.edge(i, j)) comp.unite(i, j);
  std::vector<long long> size(n, 0);
  for (int i = 0; i < n; ++i) ++size[comp.find(i)];
  long long reachable = 0;
  for (long long s : size) reachable += s * (s - 1) / 2;
  r.connectedness =
      static_cast<double>(reachable) / (static_cast<double>(n) * (n - 1) / 2);
  return r;
}

}  // namespace graphmix
