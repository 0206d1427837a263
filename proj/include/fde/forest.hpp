#pragma once

// Forests on labeled vertices, union-find cycle detection, maximum spanning
// trees by Kruskal's greedy insertion, and held-out pruning of the insertion
// order into a forest.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "fde/types.hpp"

namespace fde {

using Edge = std::pair<int, int>;  // canonical: first < second

inline Edge make_edge(int i, int j) {
  return i < j ? Edge{i, j} : Edge{j, i};
}

class DisjointSet {
 public:
  explicit DisjointSet(int n) : parent_(n), rank_(n, 0), components_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];  // path halving
      a = parent_[a];
    }
    return a;
  }

  // Merges the sets of a and b; false if they were already joined.
  bool unite(int a, int b) {
    int ra = find(a), rb = find(b);
    if (ra == rb) return false;
    if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    if (rank_[ra] == rank_[rb]) ++rank_[ra];
    --components_;
    return true;
  }

  int components() const { return components_; }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
  int components_;
};

// Undirected acyclic graph with degree bookkeeping.
class Forest {
 public:
  explicit Forest(int d) : d_(d), degrees_(d, 0) {
    if (d < 1) throw ContractViolation("Forest: vertex count must be positive");
  }

  Forest(int d, const std::vector<Edge>& edges) : Forest(d) {
    DisjointSet dsu(d);
    for (const Edge& e : edges) {
      check_vertex(e.first);
      check_vertex(e.second);
      Edge c = make_edge(e.first, e.second);
      if (c.first == c.second) throw ContractViolation("Forest: self-loop");
      if (!edges_.insert(c).second) throw ContractViolation("Forest: duplicate edge");
      if (!dsu.unite(c.first, c.second)) throw ContractViolation("Forest: edge set has a cycle");
      ++degrees_[c.first];
      ++degrees_[c.second];
    }
  }

  int d() const { return d_; }
  const std::set<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool has_edge(int i, int j) const { return edges_.count(make_edge(i, j)) > 0; }

  int degree(int v) const {
    check_vertex(v);
    return degrees_[v];
  }
  const std::vector<int>& degrees() const { return degrees_; }

  bool is_spanning_tree() const {
    return edges_.size() == static_cast<std::size_t>(d_ - 1);
  }

  bool operator==(const Forest& other) const {
    return d_ == other.d_ && edges_ == other.edges_;
  }

 private:
  void check_vertex(int v) const {
    if (v < 0 || v >= d_) throw ContractViolation("Forest: vertex index out of range");
  }

  int d_;
  std::set<Edge> edges_;
  std::vector<int> degrees_;
};

// One Kruskal insertion step: the chosen edge and the weight that ranked it.
struct TraceEntry {
  int i;
  int j;
  double adjusted_weight;
};

// Edges in insertion order; every prefix is a forest.
using EdgeTrace = std::vector<TraceEntry>;

// Maximum spanning tree by greedy insertion: d-1 edges in non-increasing
// weight order subject to acyclicity. Ties break toward the lexicographically
// smaller vertex pair, and the tree is completed even through negative
// weights; sparsity comes only from the pruning pass.
inline std::pair<Forest, EdgeTrace> kruskal(const WeightMatrix& w) {
  const int d = static_cast<int>(w.d());
  if (d < 2) throw ContractViolation("kruskal: need at least two vertices");
  if (!w.is_symmetric()) throw ContractViolation("kruskal: weight matrix is not symmetric");

  struct Cand {
    double weight;
    int i, j;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<std::size_t>(d) * (d - 1) / 2);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) cands.push_back({w(i, j), i, j});
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  DisjointSet dsu(d);
  std::vector<Edge> edges;
  EdgeTrace trace;
  edges.reserve(d - 1);
  trace.reserve(d - 1);
  for (const Cand& c : cands) {
    if (!dsu.unite(c.i, c.j)) continue;
    edges.emplace_back(c.i, c.j);
    trace.push_back({c.i, c.j, c.weight});
    if (static_cast<int>(edges.size()) == d - 1) break;
  }
  return {Forest(d, edges), trace};
}

// Keeps the first k* edges of the trace, where k* maximizes the cumulative
// held-out terms over prefixes; ties resolve to the smallest k (the sparser
// forest), so all-negative terms yield the empty forest.
inline Forest prune_by_holdout(int d, const EdgeTrace& trace,
                               const std::vector<double>& holdout_terms) {
  if (holdout_terms.size() != trace.size())
    throw ContractViolation("prune_by_holdout: trace and terms differ in length");
  double cum = 0.0, best = 0.0;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    cum += holdout_terms[k];
    if (cum > best) {
      best = cum;
      best_k = k + 1;
    }
  }
  std::vector<Edge> kept;
  kept.reserve(best_k);
  for (std::size_t k = 0; k < best_k; ++k) kept.push_back(make_edge(trace[k].i, trace[k].j));
  return Forest(d, kept);
}

// Per-edge lookup of the held-out terms along a trace.
inline std::vector<double> trace_terms(const EdgeTrace& trace, const WeightMatrix& holdout) {
  std::vector<double> terms;
  terms.reserve(trace.size());
  for (const TraceEntry& e : trace) terms.push_back(holdout(e.i, e.j));
  return terms;
}

}  // namespace fde
