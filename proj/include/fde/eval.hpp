#pragma once

// Edge-recovery scoring against a known truth, common-edge accounting across
// units, held-out log-likelihood of a forest, and grid search over the
// penalty scale.

#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "fde/forest.hpp"
#include "fde/types.hpp"

namespace fde {

struct ScoreReport {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double holdout_loglik = 0.0;
};

// Precision/recall/F1 over unordered edge sets. Two empty edge sets count as
// perfect agreement.
inline ScoreReport f1_score(const Forest& estimated, const Forest& truth) {
  if (estimated.d() != truth.d())
    throw ContractViolation("f1_score: vertex count mismatch");
  ScoreReport r;
  for (const Edge& e : estimated.edges())
    if (truth.edges().count(e))
      ++r.true_positive;
    else
      ++r.false_positive;
  r.false_negative = truth.edge_count() - r.true_positive;
  if (estimated.edge_count() == 0 && truth.edge_count() == 0) {
    r.precision = r.recall = r.f1 = 1.0;
    return r;
  }
  r.precision = estimated.edge_count() == 0
                    ? 0.0
                    : static_cast<double>(r.true_positive) / estimated.edge_count();
  r.recall = truth.edge_count() == 0
                 ? 0.0
                 : static_cast<double>(r.true_positive) / truth.edge_count();
  r.f1 = (r.precision + r.recall) > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

// Intersection of the units' edge sets.
inline std::set<Edge> common_edges(const std::vector<Forest>& forests) {
  if (forests.empty()) throw ContractViolation("common_edges: no forests given");
  const int d = forests.front().d();
  for (const Forest& f : forests)
    if (f.d() != d) throw ContractViolation("common_edges: vertex count mismatch");
  std::set<Edge> common = forests.front().edges();
  for (std::size_t k = 1; k < forests.size() && !common.empty(); ++k) {
    std::set<Edge> next;
    for (const Edge& e : common)
      if (forests[k].edges().count(e)) next.insert(e);
    common.swap(next);
  }
  return common;
}

// Sum of pairwise held-out terms over the forest's edges. Univariate entropy
// terms are omitted; they are constant across candidate forests.
inline double holdout_loglik(const Forest& forest, const WeightMatrix& terms) {
  if (forest.d() != static_cast<int>(terms.d()))
    throw ContractViolation("holdout_loglik: dimension mismatch");
  double s = 0.0;
  for (const Edge& e : forest.edges()) s += terms(e.first, e.second);
  return s;
}

template <typename FitT>
struct TuneResult {
  double lambda = 0.0;
  std::optional<FitT> fit;  // engaged once at least one grid point ran
  double score = 0.0;
  std::vector<std::pair<double, double>> grid_scores;  // (lambda, score)
};

// Runs the fit at every grid value and keeps the best score; ties break
// toward the smaller lambda.
template <typename Fitter, typename Scorer>
auto tune(std::span<const double> grid, Fitter&& fit_at, Scorer&& score_of)
    -> TuneResult<std::decay_t<decltype(fit_at(0.0))>> {
  if (grid.empty()) throw ContractViolation("tune: empty lambda grid");
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  TuneResult<std::decay_t<decltype(fit_at(0.0))>> best;
  for (double lambda : sorted) {
    auto fit = fit_at(lambda);
    double s = score_of(fit);
    best.grid_scores.emplace_back(lambda, s);
    if (!best.fit || s > best.score) {
      best.lambda = lambda;
      best.fit = std::move(fit);
      best.score = s;
    }
  }
  return best;
}

inline double mean_offdiagonal(const WeightMatrix& w) {
  const Eigen::Index d = w.d();
  if (d < 2) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) s += w(i, j);
  return s / (0.5 * static_cast<double>(d) * static_cast<double>(d - 1));
}

// Default penalty grid: fixed multipliers scaled by the mean off-diagonal MI.
inline std::vector<double> default_lambda_grid(const WeightMatrix& w) {
  static constexpr double multipliers[] = {0.0, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1};
  double scale = mean_offdiagonal(w);
  std::vector<double> grid;
  for (double m : multipliers) grid.push_back(m * scale);
  return grid;
}

}  // namespace fde
