#pragma once

// The three tree estimators: a single Kruskal pass over mutual-information
// weights (FDE), the degree-penalized scale-free variant, and joint
// estimation across several units with a shared-edge prior. The penalized
// variants maximize their objectives by minorize-maximization: each step
// linearizes the concave penalty at the current tree, which reduces the
// subproblem to a maximum spanning tree with adjusted weights.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fde/forest.hpp"
#include "fde/math.hpp"
#include "fde/types.hpp"

namespace fde {

enum class Convergence { edge_set_stable, objective_delta };

struct PriorConfig {
  double lambda = 0.0;  // penalty scale
  double alpha = 1.0;   // Beta shape / power-law exponent
  double beta = 1.0;    // Beta shape
  int max_iters = 50;
  Convergence convergence = Convergence::edge_set_stable;
  double tau_obj = 1e-8;  // used by objective_delta

  void validate() const {
    if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
    if (!(alpha > 0.0) || !(beta > 0.0)) throw ConfigError("alpha and beta must be positive");
    if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (convergence == Convergence::objective_delta && !(tau_obj > 0.0))
      throw ConfigError("tau_obj must be positive");
  }
};

struct FitResult {
  Forest tree;    // full spanning tree at the returned iterate
  Forest pruned;  // held-out pruned forest, a prefix of trace
  EdgeTrace trace;
  std::vector<double> objective_per_iter;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline double edge_weight_sum(const Forest& f, const WeightMatrix& w) {
  double s = 0.0;
  for (const Edge& e : f.edges()) s += w(e.first, e.second);
  return s;
}

}  // namespace detail

// Plain forest density estimation: one maximum-spanning-tree pass over the
// MI weights, then held-out pruning of the insertion order.
inline FitResult fit_fde(const WeightMatrix& w, const WeightMatrix& holdout_terms) {
  auto [tree, trace] = kruskal(w);
  double objective = detail::edge_weight_sum(tree, w);
  Forest pruned = prune_by_holdout(tree.d(), trace, trace_terms(trace, holdout_terms));
  return FitResult{std::move(tree), std::move(pruned), std::move(trace), {objective}, 1, true};
}

// Penalized objective sum_E w_ij - lambda * sum_l log(degree_l). Only
// spanning trees are admitted when lambda > 0 (a zero degree would make the
// penalty infinite).
inline double scalefree_objective(const Forest& f, const WeightMatrix& w,
                                  const PriorConfig& cfg) {
  cfg.validate();
  if (f.d() != static_cast<int>(w.d()))
    throw ContractViolation("scalefree_objective: dimension mismatch");
  double value = detail::edge_weight_sum(f, w);
  if (cfg.lambda > 0.0) {
    for (int v = 0; v < f.d(); ++v) {
      int deg = f.degree(v);
      if (deg == 0)
        throw ContractViolation("scalefree_objective: degree-0 vertex with lambda > 0");
      value -= cfg.lambda * std::log(static_cast<double>(deg));
    }
  }
  return value;
}

namespace detail {

// Weight update of the scale-free minorizer: each edge pays lambda/deg at
// both endpoints, so edges into well-connected vertices are discounted less.
inline WeightMatrix scalefree_adjusted(const WeightMatrix& w, const Forest& current,
                                       double lambda) {
  WeightMatrix adj(w.labels);
  const Eigen::Index d = w.d();
  for (Eigen::Index i = 0; i < d; ++i) {
    double pi = lambda / current.degree(static_cast<int>(i));
    for (Eigen::Index j = i + 1; j < d; ++j)
      adj.set_pair(i, j, w(i, j) - pi - lambda / current.degree(static_cast<int>(j)));
  }
  return adj;
}

}  // namespace detail

// Scale-free FDE (minorize-maximization around Kruskal). Stops when the edge
// set repeats; an edge set recurring from two or more iterations back is a
// limit cycle between equal-objective trees, in which case the best iterate
// is returned with converged=false.
inline FitResult fit_scalefree(const WeightMatrix& w, const PriorConfig& cfg,
                               const WeightMatrix& holdout_terms) {
  cfg.validate();
  std::vector<Forest> trees;
  std::vector<EdgeTrace> traces;
  std::vector<double> objs;

  auto [t0, tr0] = kruskal(w);
  trees.push_back(std::move(t0));
  traces.push_back(std::move(tr0));
  objs.push_back(scalefree_objective(trees.back(), w, cfg));
  bool converged = false;

  while (static_cast<int>(trees.size()) < cfg.max_iters) {
    WeightMatrix adj = detail::scalefree_adjusted(w, trees.back(), cfg.lambda);
    auto [t, tr] = kruskal(adj);
    double obj = scalefree_objective(t, w, cfg);
    bool same_as_prev = (t == trees.back());
    bool cycles = false;
    if (!same_as_prev)
      for (std::size_t k = 0; k + 1 < trees.size(); ++k)
        if (t == trees[k]) {
          cycles = true;
          break;
        }
    trees.push_back(std::move(t));
    traces.push_back(std::move(tr));
    objs.push_back(obj);
    if (same_as_prev) {
      converged = true;
      break;
    }
    if (cfg.convergence == Convergence::objective_delta &&
        std::fabs(objs[objs.size() - 1] - objs[objs.size() - 2]) < cfg.tau_obj) {
      converged = true;
      break;
    }
    if (cycles) break;
  }

  // latest iterate attaining the maximal objective (the converged tree when
  // the trace is monotone)
  std::size_t best = 0;
  for (std::size_t k = 1; k < objs.size(); ++k)
    if (objs[k] >= objs[best]) best = k;

  Forest pruned = prune_by_holdout(trees[best].d(), traces[best],
                                   trace_terms(traces[best], holdout_terms));
  return FitResult{std::move(trees[best]), std::move(pruned), std::move(traces[best]),
                   std::move(objs), static_cast<int>(trees.size()), converged};
}

// log B(alpha + k, beta + K - k): the marginal prior weight of an edge shared
// by k of K units.
inline double beta_penalty(int k, const PriorConfig& cfg, int units) {
  cfg.validate();
  if (k < 0 || k > units) throw ContractViolation("beta_penalty: k outside [0, K]");
  return std::lgamma(cfg.alpha + k) + std::lgamma(cfg.beta + units - k) -
         std::lgamma(cfg.alpha + cfg.beta + units);
}

// Joint objective: per-unit edge-weight totals plus lambda times the log-Beta
// sharing penalty over all vertex pairs.
inline double joint_objective(const std::vector<Forest>& forests,
                              const std::vector<WeightMatrix>& weights,
                              const PriorConfig& cfg) {
  cfg.validate();
  if (forests.empty() || forests.size() != weights.size())
    throw ContractViolation("joint_objective: unit count mismatch");
  const int K = static_cast<int>(forests.size());
  const int d = forests.front().d();
  for (int k = 0; k < K; ++k)
    if (forests[k].d() != d || static_cast<int>(weights[k].d()) != d)
      throw ContractViolation("joint_objective: dimension mismatch across units");

  double value = 0.0;
  for (int k = 0; k < K; ++k) value += detail::edge_weight_sum(forests[k], weights[k]);
  if (cfg.lambda != 0.0) {
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        int shared = 0;
        for (const Forest& f : forests) shared += f.has_edge(i, j) ? 1 : 0;
        value += cfg.lambda * beta_penalty(shared, cfg, K);
      }
  }
  return value;
}

// Joint estimation across K units. Each iteration recomputes the shared-edge
// counts, shifts every unit's weights by the digamma difference (positive for
// widely shared edges), and re-runs Kruskal per unit.
inline std::vector<FitResult> fit_joint(const std::vector<WeightMatrix>& weights,
                                        const PriorConfig& cfg,
                                        const std::vector<WeightMatrix>& holdout_terms) {
  cfg.validate();
  const int K = static_cast<int>(weights.size());
  if (K < 2) throw ContractViolation("fit_joint: need at least two units");
  if (holdout_terms.size() != weights.size())
    throw ContractViolation("fit_joint: held-out terms count mismatch");
  const Eigen::Index d = weights.front().d();
  for (const WeightMatrix& w : weights)
    if (w.d() != d || w.labels != weights.front().labels)
      throw ContractViolation("fit_joint: units disagree on variables");

  using JointState = std::vector<Forest>;
  std::vector<JointState> states;
  std::vector<std::vector<EdgeTrace>> traces;
  std::vector<double> objs;

  JointState init;
  std::vector<EdgeTrace> init_traces;
  for (int k = 0; k < K; ++k) {
    auto [t, tr] = kruskal(weights[k]);
    init.push_back(std::move(t));
    init_traces.push_back(std::move(tr));
  }
  states.push_back(std::move(init));
  traces.push_back(std::move(init_traces));
  objs.push_back(joint_objective(states.back(), weights, cfg));
  bool converged = false;

  while (static_cast<int>(states.size()) < cfg.max_iters) {
    const JointState& cur = states.back();
    // shared counts and the common weight adjustment
    Eigen::MatrixXd shift = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = i + 1; j < d; ++j) {
        int shared = 0;
        for (const Forest& f : cur)
          shared += f.has_edge(static_cast<int>(i), static_cast<int>(j)) ? 1 : 0;
        double s = cfg.lambda *
                   (digamma(cfg.alpha + shared) - digamma(cfg.beta + K - shared));
        shift(i, j) = shift(j, i) = s;
      }

    JointState next;
    std::vector<EdgeTrace> next_traces;
    for (int k = 0; k < K; ++k) {
      WeightMatrix adj(weights[k].labels);
      adj.w = weights[k].w + shift;
      adj.w.diagonal().setZero();
      auto [t, tr] = kruskal(adj);
      next.push_back(std::move(t));
      next_traces.push_back(std::move(tr));
    }
    double obj = joint_objective(next, weights, cfg);
    bool same_as_prev = (next == states.back());
    bool cycles = false;
    if (!same_as_prev)
      for (std::size_t s = 0; s + 1 < states.size(); ++s)
        if (next == states[s]) {
          cycles = true;
          break;
        }
    states.push_back(std::move(next));
    traces.push_back(std::move(next_traces));
    objs.push_back(obj);
    if (same_as_prev) {
      converged = true;
      break;
    }
    if (cfg.convergence == Convergence::objective_delta &&
        std::fabs(objs[objs.size() - 1] - objs[objs.size() - 2]) < cfg.tau_obj) {
      converged = true;
      break;
    }
    if (cycles) break;
  }

  std::size_t best = 0;
  for (std::size_t s = 1; s < objs.size(); ++s)
    if (objs[s] >= objs[best]) best = s;

  std::vector<FitResult> results;
  results.reserve(K);
  for (int k = 0; k < K; ++k) {
    Forest tree = states[best][k];
    EdgeTrace trace = traces[best][k];
    Forest pruned =
        prune_by_holdout(tree.d(), trace, trace_terms(trace, holdout_terms[k]));
    results.push_back(FitResult{std::move(tree), std::move(pruned), std::move(trace), objs,
                                static_cast<int>(states.size()), converged});
  }
  return results;
}

}  // namespace fde
