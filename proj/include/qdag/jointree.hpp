#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "qdag/network.hpp"

namespace qdag {

struct UndirectedGraph {
  std::vector<std::set<VarIndex>> adjacency;

  explicit UndirectedGraph(std::size_t n = 0) : adjacency(n) {}
  std::size_t size() const { return adjacency.size(); }
  void add_edge(VarIndex a, VarIndex b);
  bool has_edge(VarIndex a, VarIndex b) const { return adjacency.at(a).count(b) != 0; }
  std::size_t edge_count() const;
};

struct Triangulation {
  UndirectedGraph moral;
  UndirectedGraph filled;  // moral graph plus fill-in, chordal
  std::vector<VarIndex> order;
  /// cliques[i] = order[i] together with its neighbours still uneliminated at step i.
  std::vector<std::vector<VarIndex>> cliques;
  std::size_t fill_in = 0;
};

/// Moralizes and triangulates by min-fill elimination; ties go to the
/// lowest variable index.
Triangulation moralize_and_triangulate(const BeliefNetwork& net);

struct Cluster {
  std::size_t id = 0;
  std::vector<VarIndex> scope;              // ascending variable index
  std::vector<VarIndex> assigned_families;  // ascending variable index
};

struct JoinTreeEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  std::vector<VarIndex> separator;
};

struct JoinTree {
  std::vector<Cluster> clusters;
  std::vector<JoinTreeEdge> edges;
  std::vector<std::vector<std::size_t>> neighbors;  // ascending cluster id
  std::vector<std::size_t> family_cluster;          // variable -> cluster holding its CPT

  bool contains(std::size_t cluster, VarIndex v) const;
  /// Lowest-id cluster containing v.
  std::size_t pivot_for(VarIndex v) const;
  std::size_t max_cluster_size() const;
  std::size_t total_table_size(const Cardinalities& cards) const;
};

/// Clusters are the maximal elimination cliques in elimination order; edges
/// form a maximum spanning tree over separator size (ties by lower ids,
/// empty separators allowed so the result is always a single tree). Each CPT
/// lands in the smallest containing cluster, ties by lowest id.
JoinTree build_jointree(const BeliefNetwork& net);

using DirectedEdge = std::pair<std::size_t, std::size_t>;  // (from, to)

/// Messages needed to collect evidence at `pivot`, in post order: a
/// depth-first walk from the pivot visiting neighbours in ascending id, each
/// message listed after every message it depends on. The numeric oracle and
/// the compiler both follow this order.
std::vector<DirectedEdge> collect_schedule(const JoinTree& jt, std::size_t pivot);

/// Exhaustive path check of the running intersection property.
bool has_running_intersection(const JoinTree& jt);
bool is_tree(const JoinTree& jt);

}  // namespace qdag
