#include "qdag/jointree.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace qdag {

void UndirectedGraph::add_edge(VarIndex a, VarIndex b) {
  if (a == b) return;
  adjacency.at(a).insert(b);
  adjacency.at(b).insert(a);
}

std::size_t UndirectedGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& adj : adjacency) twice += adj.size();
  return twice / 2;
}

Triangulation moralize_and_triangulate(const BeliefNetwork& net) {
  const std::size_t n = net.size();
  Triangulation t;
  t.moral = UndirectedGraph(n);
  for (VarIndex v = 0; v < n; ++v) {
    const auto& parents = net.parents(v);
    for (std::size_t i = 0; i < parents.size(); ++i) {
      t.moral.add_edge(v, parents[i]);
      for (std::size_t j = i + 1; j < parents.size(); ++j) t.moral.add_edge(parents[i], parents[j]);
    }
  }
  t.filled = t.moral;

  UndirectedGraph work = t.moral;
  std::vector<bool> eliminated(n, false);

  auto fill_count = [&](VarIndex v) {
    std::size_t missing = 0;
    const auto& nb = work.adjacency[v];
    for (auto i = nb.begin(); i != nb.end(); ++i)
      for (auto j = std::next(i); j != nb.end(); ++j)
        if (!work.has_edge(*i, *j)) ++missing;
    return missing;
  };

  for (std::size_t step = 0; step < n; ++step) {
    VarIndex best = n;
    std::size_t best_fill = 0;
    for (VarIndex v = 0; v < n; ++v) {
      if (eliminated[v]) continue;
      const std::size_t f = fill_count(v);
      if (best == n || f < best_fill) {
        best = v;
        best_fill = f;
      }
    }
    std::vector<VarIndex> nb(work.adjacency[best].begin(), work.adjacency[best].end());
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        if (!work.has_edge(nb[i], nb[j])) {
          work.add_edge(nb[i], nb[j]);
          t.filled.add_edge(nb[i], nb[j]);
          ++t.fill_in;
        }
      }
    std::vector<VarIndex> clique = nb;
    clique.push_back(best);
    std::sort(clique.begin(), clique.end());
    t.cliques.push_back(std::move(clique));
    t.order.push_back(best);

    for (VarIndex u : nb) work.adjacency[u].erase(best);
    work.adjacency[best].clear();
    eliminated[best] = true;
  }
  return t;
}

bool JoinTree::contains(std::size_t cluster, VarIndex v) const {
  const auto& s = clusters.at(cluster).scope;
  return std::binary_search(s.begin(), s.end(), v);
}

std::size_t JoinTree::pivot_for(VarIndex v) const {
  for (const auto& c : clusters)
    if (contains(c.id, v)) return c.id;
  throw std::out_of_range("variable not covered by any cluster");
}

std::size_t JoinTree::max_cluster_size() const {
  std::size_t m = 0;
  for (const auto& c : clusters) m = std::max(m, c.scope.size());
  return m;
}

std::size_t JoinTree::total_table_size(const Cardinalities& cards) const {
  std::size_t total = 0;
  for (const auto& c : clusters) {
    std::size_t size = 1;
    for (VarIndex v : c.scope) size *= cards[v];
    total += size;
  }
  return total;
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

std::vector<VarIndex> intersect(const std::vector<VarIndex>& a, const std::vector<VarIndex>& b) {
  std::vector<VarIndex> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool subset_of(const std::vector<VarIndex>& a, const std::vector<VarIndex>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

JoinTree build_jointree(const BeliefNetwork& net) {
  const Triangulation tri = moralize_and_triangulate(net);
  JoinTree jt;

  // A clique can only be subsumed by an earlier one: later cliques no longer
  // contain the variable eliminated here.
  for (const auto& clique : tri.cliques) {
    bool maximal = std::none_of(jt.clusters.begin(), jt.clusters.end(),
                                [&](const Cluster& c) { return subset_of(clique, c.scope); });
    if (maximal) jt.clusters.push_back(Cluster{jt.clusters.size(), clique, {}});
  }

  struct Candidate {
    std::size_t weight, a, b;
  };
  std::vector<Candidate> candidates;
  const std::size_t k = jt.clusters.size();
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      candidates.push_back({intersect(jt.clusters[a].scope, jt.clusters[b].scope).size(), a, b});
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  DisjointSets sets(k);
  jt.neighbors.assign(k, {});
  for (const auto& c : candidates) {
    if (!sets.unite(c.a, c.b)) continue;
    jt.edges.push_back({c.a, c.b, intersect(jt.clusters[c.a].scope, jt.clusters[c.b].scope)});
    jt.neighbors[c.a].push_back(c.b);
    jt.neighbors[c.b].push_back(c.a);
  }
  for (auto& nb : jt.neighbors) std::sort(nb.begin(), nb.end());

  jt.family_cluster.assign(net.size(), k);
  for (VarIndex v = 0; v < net.size(); ++v) {
    std::vector<VarIndex> family = net.parents(v);
    family.push_back(v);
    std::sort(family.begin(), family.end());
    std::size_t best = k;
    for (const auto& c : jt.clusters) {
      if (!subset_of(family, c.scope)) continue;
      if (best == k || c.scope.size() < jt.clusters[best].scope.size()) best = c.id;
    }
    if (best == k) throw std::logic_error("family not covered by any cluster");
    jt.family_cluster[v] = best;
    jt.clusters[best].assigned_families.push_back(v);
  }
  return jt;
}

std::vector<DirectedEdge> collect_schedule(const JoinTree& jt, std::size_t pivot) {
  std::vector<DirectedEdge> schedule;
  std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t node, std::size_t from) {
    for (std::size_t nb : jt.neighbors.at(node)) {
      if (nb == from) continue;
      visit(nb, node);
      schedule.emplace_back(nb, node);
    }
  };
  visit(pivot, jt.clusters.size());
  return schedule;
}

bool is_tree(const JoinTree& jt) {
  const std::size_t k = jt.clusters.size();
  if (k == 0) return jt.edges.empty();
  if (jt.edges.size() != k - 1) return false;
  DisjointSets sets(k);
  for (const auto& e : jt.edges)
    if (!sets.unite(e.a, e.b)) return false;
  return true;
}

bool has_running_intersection(const JoinTree& jt) {
  const std::size_t k = jt.clusters.size();
  // Path between i and j via parent pointers of a BFS rooted at i.
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::size_t> parent(k, k);
    std::vector<std::size_t> queue{i};
    parent[i] = i;
    for (std::size_t q = 0; q < queue.size(); ++q)
      for (std::size_t nb : jt.neighbors[queue[q]])
        if (parent[nb] == k) {
          parent[nb] = queue[q];
          queue.push_back(nb);
        }
    for (std::size_t j = i + 1; j < k; ++j) {
      if (parent[j] == k) return false;
      const auto common = intersect(jt.clusters[i].scope, jt.clusters[j].scope);
      for (std::size_t c = j; c != i; c = parent[c])
        if (!subset_of(common, jt.clusters[c].scope)) return false;
    }
  }
  return true;
}

}  // namespace qdag
