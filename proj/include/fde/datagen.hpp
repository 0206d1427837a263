#pragma once

// Synthetic truth graphs (preferential-attachment trees and star forests,
// optionally with structure shared across units) and sampling of datasets
// that are Markov to a given tree under Gaussian or Student-t pair copulas.
// Every marginal is uniform(0,1); dependence lives entirely in the copula.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fde/forest.hpp"
#include "fde/math.hpp"
#include "fde/parallel.hpp"
#include "fde/rng.hpp"
#include "fde/types.hpp"

namespace fde {

struct GraphGenSpec {
  enum class Kind { scale_free, stars };
  Kind kind = Kind::scale_free;
  int d = 100;
  // scale_free: attachment probability proportional to degree^alpha_pa,
  // starting from a path of seed_chain_len vertices
  double alpha_pa = 1.5;
  int seed_chain_len = 4;
  // stars: num_stars disjoint stars of star_size vertices each
  int num_stars = 0;
  int star_size = 0;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (kind == Kind::scale_free) {
      if (seed_chain_len < 2) throw ConfigError("seed chain needs at least 2 vertices");
      if (d < seed_chain_len) throw ConfigError("d must be at least the seed chain length");
      if (alpha_pa < 0.0) throw ConfigError("attachment exponent must be nonnegative");
    } else {
      if (num_stars < 1 || star_size < 2)
        throw ConfigError("stars need num_stars >= 1 and star_size >= 2");
      if (num_stars * star_size != d)
        throw ConfigError("num_stars * star_size must equal d");
    }
  }
};

struct CopulaSpec {
  enum class Family { gaussian, student_t };
  Family family = Family::gaussian;
  double rho = 0.4;
  double nu = 1.0;  // t only
  Eigen::Index n = 0;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(std::fabs(rho) < 1.0)) throw ConfigError("|rho| must be below 1");
    if (family == Family::student_t && !(nu >= 1.0))
      throw ConfigError("t copula needs nu >= 1");
    if (n < 1) throw ConfigError("sample count must be positive");
  }
};

struct MultiGraphSpec {
  int units = 2;  // K
  GraphGenSpec base;
  int shared_size = 0;   // scale-free: vertex count of the common subtree
  int shared_stars = 0;  // stars: number of common stars
  std::uint64_t rng_seed = 0;

  void validate() const {
    base.validate();
    if (units < 2) throw ConfigError("need at least two units");
    if (base.kind == GraphGenSpec::Kind::scale_free) {
      if (shared_size < base.seed_chain_len || shared_size > base.d)
        throw ConfigError("shared subtree size must lie in [seed chain length, d]");
    } else {
      if (shared_stars < 0 || shared_stars >= base.num_stars)
        throw ConfigError("shared star count must be below num_stars");
      if (units > base.star_size)
        throw ConfigError("cannot give more units distinct roots than a star has vertices");
    }
  }
};

namespace detail {

constexpr std::uint64_t kRowStreamBase = 1ULL << 32;

// Grows a preferential-attachment tree from `grown` to `target` vertices in
// place; degrees index the full vertex range.
inline void grow_pa(std::vector<Edge>& edges, std::vector<double>& degrees, int grown,
                    int target, double alpha_pa, std::mt19937_64& rng) {
  for (int v = grown; v < target; ++v) {
    double total = 0.0;
    std::vector<double> cum(static_cast<std::size_t>(v));
    for (int u = 0; u < v; ++u) {
      total += std::pow(degrees[u], alpha_pa);
      cum[u] = total;
    }
    double pick = uniform01(rng) * total;
    int target_vertex =
        static_cast<int>(std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin());
    if (target_vertex >= v) target_vertex = v - 1;
    edges.push_back(make_edge(target_vertex, v));
    degrees[target_vertex] += 1.0;
    degrees[v] = 1.0;
  }
}

inline std::vector<Edge> star_block(int root, int start, int size) {
  std::vector<Edge> edges;
  for (int m = 0; m < size; ++m)
    if (start + m != root) edges.push_back(make_edge(root, start + m));
  return edges;
}

}  // namespace detail

// Scale-free spanning tree: a seed path, then one new vertex at a time
// attached with probability proportional to current degree^alpha_pa.
inline Forest gen_scale_free(const GraphGenSpec& spec) {
  spec.validate();
  if (spec.kind != GraphGenSpec::Kind::scale_free)
    throw ConfigError("gen_scale_free: spec kind mismatch");
  std::vector<Edge> edges;
  std::vector<double> degrees(static_cast<std::size_t>(spec.d), 0.0);
  for (int v = 0; v + 1 < spec.seed_chain_len; ++v) {
    edges.push_back(make_edge(v, v + 1));
    degrees[v] += 1.0;
    degrees[v + 1] += 1.0;
  }
  std::mt19937_64 rng = substream(spec.rng_seed, 0);
  detail::grow_pa(edges, degrees, spec.seed_chain_len, spec.d, spec.alpha_pa, rng);
  return Forest(spec.d, edges);
}

// Forest of disjoint stars; each block's first vertex is its root.
inline Forest gen_stars(const GraphGenSpec& spec) {
  spec.validate();
  if (spec.kind != GraphGenSpec::Kind::stars)
    throw ConfigError("gen_stars: spec kind mismatch");
  std::vector<Edge> edges;
  for (int s = 0; s < spec.num_stars; ++s) {
    auto block = detail::star_block(s * spec.star_size, s * spec.star_size, spec.star_size);
    edges.insert(edges.end(), block.begin(), block.end());
  }
  return Forest(spec.d, edges);
}

// K structurally similar graphs. Scale-free: a common tree of shared_size
// vertices grown once, which every unit then extends independently to d.
// Stars: shared blocks plus per-unit individual stars whose roots differ
// across units (unit k roots its individual blocks at offset k).
inline std::vector<Forest> gen_multi(const MultiGraphSpec& spec) {
  spec.validate();
  std::vector<Forest> units;
  units.reserve(spec.units);

  if (spec.base.kind == GraphGenSpec::Kind::scale_free) {
    std::vector<Edge> common;
    std::vector<double> degrees(static_cast<std::size_t>(spec.base.d), 0.0);
    for (int v = 0; v + 1 < spec.base.seed_chain_len; ++v) {
      common.push_back(make_edge(v, v + 1));
      degrees[v] += 1.0;
      degrees[v + 1] += 1.0;
    }
    std::mt19937_64 rng = substream(spec.rng_seed, 0);
    detail::grow_pa(common, degrees, spec.base.seed_chain_len, spec.shared_size,
                    spec.base.alpha_pa, rng);
    for (int k = 0; k < spec.units; ++k) {
      std::vector<Edge> edges = common;
      std::vector<double> deg = degrees;
      std::mt19937_64 unit_rng = substream(spec.rng_seed, static_cast<std::uint64_t>(k) + 1);
      detail::grow_pa(edges, deg, spec.shared_size, spec.base.d, spec.base.alpha_pa, unit_rng);
      units.emplace_back(spec.base.d, edges);
    }
    return units;
  }

  for (int k = 0; k < spec.units; ++k) {
    std::vector<Edge> edges;
    for (int s = 0; s < spec.base.num_stars; ++s) {
      int start = s * spec.base.star_size;
      int root = s < spec.shared_stars ? start : start + k;
      auto block = detail::star_block(root, start, spec.base.star_size);
      edges.insert(edges.end(), block.begin(), block.end());
    }
    units.emplace_back(spec.base.d, edges);
  }
  return units;
}

// Samples n rows Markov to the forest. Each connected component is seeded at
// its lowest-index vertex with a uniform draw; children follow the pair
// copula's conditional given the parent, mapped back to the uniform scale.
// Rows use independent substreams keyed by row index, so generation can run
// on any thread count with identical output.
inline Dataset sample_tree_copula(const Forest& tree, const CopulaSpec& spec,
                                  unsigned threads = 1) {
  spec.validate();
  const int d = tree.d();

  // fixed traversal: (vertex, parent) pairs, components rooted at their
  // lowest index, neighbors visited in ascending order
  std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(d));
  for (const Edge& e : tree.edges()) {
    adjacency[e.first].push_back(e.second);
    adjacency[e.second].push_back(e.first);
  }
  for (auto& nb : adjacency) std::sort(nb.begin(), nb.end());
  std::vector<std::pair<int, int>> order;
  order.reserve(d);
  std::vector<bool> visited(static_cast<std::size_t>(d), false);
  for (int root = 0; root < d; ++root) {
    if (visited[root]) continue;
    visited[root] = true;
    order.emplace_back(root, -1);
    for (std::size_t head = order.size() - 1; head < order.size(); ++head) {
      int v = order[head].first;
      for (int u : adjacency[v])
        if (!visited[u]) {
          visited[u] = true;
          order.emplace_back(u, v);
        }
    }
  }

  const double rho = spec.rho;
  const double nu = spec.nu;
  const bool gaussian = spec.family == CopulaSpec::Family::gaussian;
  Dataset out;
  out.values.resize(spec.n, d);
  out.column_names.resize(static_cast<std::size_t>(d));
  for (int c = 0; c < d; ++c) out.column_names[c] = "x" + std::to_string(c + 1);

  parallel_for(static_cast<std::size_t>(spec.n), threads, [&](std::size_t row) {
    std::mt19937_64 rng = substream(spec.rng_seed, detail::kRowStreamBase + row);
    std::vector<double> latent(static_cast<std::size_t>(d));
    for (const auto& [v, parent] : order) {
      double u = uniform01(rng);
      if (parent < 0) {
        latent[v] = gaussian ? norm_quantile(u) : student_t_quantile(u, nu);
        out.values(static_cast<Eigen::Index>(row), v) = u;
      } else if (gaussian) {
        double z = rho * latent[parent] + std::sqrt(1.0 - rho * rho) * norm_quantile(u);
        latent[v] = z;
        out.values(static_cast<Eigen::Index>(row), v) = norm_cdf(z);
      } else {
        // conditional of the bivariate t: location rho*t_p, nu+1 dof,
        // scale^2 = (nu + t_p^2)(1 - rho^2)/(nu + 1)
        double tp = latent[parent];
        double scale = std::sqrt((nu + tp * tp) * (1.0 - rho * rho) / (nu + 1.0));
        double t = rho * tp + scale * student_t_quantile(u, nu + 1.0);
        latent[v] = t;
        out.values(static_cast<Eigen::Index>(row), v) = student_t_cdf(t, nu);
      }
    }
  });
  return out;
}

}  // namespace fde
