#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace graphmix {

// A family of graphs on a fixed vertex set: directedness and loop
// policy determine how many binary edge variables a graph has.
struct GraphSpace {
  int n_vertices = 0;
  bool directed = false;
  bool loops = false;

  // Number of free edge variables.
  long long max_edges() const;
  // Number of unordered vertex pairs; defined for directed loopless
  // spaces only, where dyads are the natural sampling unit.
  long long max_dyads() const;

  bool operator==(const GraphSpace&) const = default;
};

void validate(const GraphSpace& space);

// Edge variable slots in lexicographic (tail, head) order.  This order
// defines bit positions for enumeration and the serialization order of
// adjacency output.
std::vector<std::pair<int, int>> edge_variables(const GraphSpace& space);

// Dense binary graph.  Undirected graphs keep the adjacency matrix
// symmetric; edge_count counts each undirected edge once.
class Graph {
 public:
  explicit Graph(const GraphSpace& space);

  const GraphSpace& space() const { return space_; }
  int n_vertices() const { return space_.n_vertices; }

  bool edge(int i, int j) const;
  void set_edge(int i, int j, bool present);
  long long edge_count() const { return edge_count_; }

  bool operator==(const Graph&) const = default;

 private:
  long long cell(int i, int j) const;

  GraphSpace space_;
  std::vector<std::uint8_t> adj_;
  long long edge_count_ = 0;
};

// Counts of mutual, asymmetric, and null dyads; sums to max_dyads().
// Defined for directed loopless graphs only.
struct DyadCensus {
  long long mutuals = 0;
  long long asymmetrics = 0;
  long long nulls = 0;
};

DyadCensus dyad_census(const Graph& g);

// Graph-level index summary.  Reciprocity is the fraction of adjacent
// dyad endpoints that are reciprocated, 2M / (2M + A); it is absent
// when the graph has no edges to reciprocate.  Connectedness is the
// fraction of vertex pairs joined by a path after ignoring edge
// direction.
struct GliRecord {
  double density = 0.0;
  std::optional<double> reciprocity;
  double connectedness = 0.0;
};

GliRecord graph_level_indices(const Graph& g);

}  // namespace graphmix
