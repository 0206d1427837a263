#pragma once

// Test-only oracles, kept independent of the library's solver path: labeled
// spanning trees enumerated through Pruefer sequences, and exhaustive prefix
// scans for the pruning rule.

#include <algorithm>
#include <vector>

#include "fde/forest.hpp"
#include "fde/types.hpp"

namespace oracle {

// Decodes a Pruefer sequence (length d-2, entries in [0, d)) into the edge
// list of the corresponding labeled tree.
inline std::vector<fde::Edge> prufer_decode(const std::vector<int>& seq, int d) {
  std::vector<int> degree(d, 1);
  for (int v : seq) ++degree[v];
  std::vector<fde::Edge> edges;
  std::vector<bool> used(d, false);
  for (int v : seq) {
    int leaf = -1;
    for (int u = 0; u < d; ++u)
      if (degree[u] == 1 && !used[u]) {
        leaf = u;
        break;
      }
    edges.push_back(fde::make_edge(leaf, v));
    used[leaf] = true;
    --degree[v];
  }
  int a = -1, b = -1;
  for (int u = 0; u < d; ++u)
    if (!used[u] && degree[u] == 1) (a < 0 ? a : b) = u;
  edges.push_back(fde::make_edge(a, b));
  return edges;
}

// Sums weights over an edge list in canonical (sorted) order, so two trees
// with the same edge set always produce the same floating-point total.
inline double canonical_total(std::vector<fde::Edge> edges, const fde::WeightMatrix& w) {
  std::sort(edges.begin(), edges.end());
  double s = 0.0;
  for (const fde::Edge& e : edges) s += w(e.first, e.second);
  return s;
}

// Maximum spanning-tree total over all d^(d-2) labeled trees.
inline double brute_force_max_tree(const fde::WeightMatrix& w) {
  const int d = static_cast<int>(w.d());
  if (d == 2) return w(0, 1);
  std::vector<int> seq(d - 2, 0);
  double best = -1e300;
  for (;;) {
    best = std::max(best, canonical_total(prufer_decode(seq, d), w));
    int pos = d - 3;
    while (pos >= 0 && seq[pos] == d - 1) seq[pos--] = 0;
    if (pos < 0) break;
    ++seq[pos];
  }
  return best;
}

// Best prefix of the cumulative sums, smallest length on ties.
inline std::size_t best_prefix(const std::vector<double>& terms) {
  double cum = 0.0, best = 0.0;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    cum += terms[k];
    if (cum > best) {
      best = cum;
      best_k = k + 1;
    }
  }
  return best_k;
}

}  // namespace oracle
