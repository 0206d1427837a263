#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fde/eval.hpp"
#include "fde/forest.hpp"
#include "fde/solvers.hpp"
#include "oracles.hpp"

using namespace fde;

namespace {

WeightMatrix random_weights(int d, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  WeightMatrix w(std::vector<std::string>(d, ""));
  for (int i = 0; i < d; ++i) w.labels[i] = "v" + std::to_string(i + 1);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) w.set_pair(i, j, unif(rng));
  return w;
}

}  // namespace

TEST_CASE("f1 of a perfect estimate is one") {
  Forest truth(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  ScoreReport r = f1_score(truth, truth);
  CHECK(r.f1 == 1.0);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.true_positive == 4);
  CHECK(r.false_positive == 0);
  CHECK(r.false_negative == 0);
}

TEST_CASE("f1 of half-covered truth without false positives is 2/3") {
  Forest truth(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  Forest est(5, {{0, 1}, {1, 2}});
  ScoreReport r = f1_score(est, truth);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 0.5);
  CHECK(r.f1 == Catch::Approx(2.0 / 3.0));
}

TEST_CASE("empty estimate scores zero; two empty graphs agree perfectly") {
  Forest truth(4, {{0, 1}, {2, 3}});
  Forest empty(4, {});
  CHECK(f1_score(empty, truth).f1 == 0.0);
  CHECK(f1_score(truth, empty).f1 == 0.0);
  CHECK(f1_score(empty, empty).f1 == 1.0);
  CHECK_THROWS_AS(f1_score(Forest(3, {}), truth), ContractViolation);
}

TEST_CASE("f1 is invariant under a consistent relabeling") {
  std::mt19937_64 rng(4);
  Forest truth(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
  Forest est(6, {{0, 1}, {1, 2}, {2, 4}, {3, 4}, {0, 5}});
  // permute vertices: v -> (v + 2) mod 6
  auto permute = [](const Forest& f) {
    std::vector<Edge> edges;
    for (const Edge& e : f.edges())
      edges.push_back(make_edge((e.first + 2) % 6, (e.second + 2) % 6));
    return Forest(6, edges);
  };
  ScoreReport a = f1_score(est, truth);
  ScoreReport b = f1_score(permute(est), permute(truth));
  CHECK(a.f1 == b.f1);
  CHECK(a.precision == b.precision);
  CHECK(a.recall == b.recall);
  CHECK(a.f1 >= 0.0);
  CHECK(a.f1 <= 1.0);
}

TEST_CASE("common_edges intersects the units") {
  Forest a(5, {{0, 1}, {1, 2}, {3, 4}});
  Forest b(5, {{0, 1}, {2, 3}, {3, 4}});
  Forest c(5, {{0, 1}, {1, 3}, {3, 4}});
  std::set<Edge> common = common_edges({a, b, c});
  CHECK(common == std::set<Edge>{{0, 1}, {3, 4}});
  CHECK(common_edges({a, a, a}) == a.edges());
  Forest disjoint(5, {{1, 4}});
  CHECK(common_edges({a, disjoint}).empty());
  CHECK_THROWS_AS(common_edges({a, Forest(4, {})}), ContractViolation);
  // the intersection is contained in every unit
  for (const Edge& e : common) {
    CHECK(a.has_edge(e.first, e.second));
    CHECK(b.has_edge(e.first, e.second));
    CHECK(c.has_edge(e.first, e.second));
  }
}

TEST_CASE("holdout_loglik sums terms additively over edges") {
  std::mt19937_64 rng(6);
  WeightMatrix terms = random_weights(6, rng, -0.3, 0.3);
  Forest empty(6, {});
  CHECK(holdout_loglik(empty, terms) == 0.0);
  Forest f(6, {{0, 1}, {2, 3}});
  double base = holdout_loglik(f, terms);
  Forest extended(6, {{0, 1}, {2, 3}, {4, 5}});
  CHECK(holdout_loglik(extended, terms) == Catch::Approx(base + terms(4, 5)).epsilon(1e-12));
}

TEST_CASE("the pruned prefix maximizes the held-out score over prefixes") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    int d = 5 + static_cast<int>(rng() % 10);
    WeightMatrix w = random_weights(d, rng);
    WeightMatrix terms = random_weights(d, rng, -0.3, 0.3);
    auto [tree, trace] = kruskal(w);
    Forest pruned = prune_by_holdout(d, trace, trace_terms(trace, terms));
    double best = holdout_loglik(pruned, terms);
    std::vector<Edge> prefix;
    for (std::size_t k = 0; k <= trace.size(); ++k) {
      if (k > 0) prefix.push_back(make_edge(trace[k - 1].i, trace[k - 1].j));
      CHECK(holdout_loglik(Forest(d, prefix), terms) <= best + 1e-12);
    }
  }
}

TEST_CASE("tune: singleton grid returns that lambda") {
  std::mt19937_64 rng(10);
  WeightMatrix w = random_weights(5, rng);
  WeightMatrix ho = random_weights(5, rng, -0.2, 0.2);
  std::vector<double> grid{0.05};
  auto fit_at = [&](double lambda) {
    PriorConfig cfg;
    cfg.lambda = lambda;
    return fit_scalefree(w, cfg, ho);
  };
  auto score = [&](const FitResult& fit) { return holdout_loglik(fit.pruned, ho); };
  auto result = tune(std::span<const double>(grid), fit_at, score);
  CHECK(result.lambda == 0.05);
  CHECK(result.fit.has_value());
  CHECK(result.grid_scores.size() == 1);
}

TEST_CASE("tune returns the grid argmax and prefers smaller lambda on ties") {
  std::mt19937_64 rng(12);
  WeightMatrix w = random_weights(8, rng);
  WeightMatrix ho = random_weights(8, rng, -0.2, 0.2);
  std::vector<double> grid{0.0, 0.01, 0.05, 0.1, 0.2};
  auto fit_at = [&](double lambda) {
    PriorConfig cfg;
    cfg.lambda = lambda;
    return fit_scalefree(w, cfg, ho);
  };
  auto score = [&](const FitResult& fit) { return holdout_loglik(fit.pruned, ho); };
  auto result = tune(std::span<const double>(grid), fit_at, score);
  double best = -1e300;
  for (auto& [lambda, s] : result.grid_scores) best = std::max(best, s);
  CHECK(result.score == best);
  // every grid point was visited in ascending order
  REQUIRE(result.grid_scores.size() == grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(result.grid_scores[k].first == grid[k]);
  // on ties the smaller lambda wins: scores equal at lambda 0 vs tiny lambda
  std::vector<double> tie_grid{0.0, 1e-12};
  auto tie = tune(std::span<const double>(tie_grid), fit_at, score);
  CHECK(tie.lambda == 0.0);
}

TEST_CASE("tune in oracle mode finds a lambda attaining maximal f1") {
  std::mt19937_64 rng(14);
  WeightMatrix w = random_weights(7, rng);
  WeightMatrix ho = random_weights(7, rng, 0.0, 0.2);
  Forest truth = fit_fde(w, ho).tree;
  std::vector<double> grid{0.0, 0.02, 0.1};
  auto fit_at = [&](double lambda) {
    PriorConfig cfg;
    cfg.lambda = lambda;
    return fit_scalefree(w, cfg, ho);
  };
  auto score = [&](const FitResult& fit) { return f1_score(fit.pruned, truth).f1; };
  auto result = tune(std::span<const double>(grid), fit_at, score);
  for (auto& [lambda, s] : result.grid_scores) CHECK(result.score >= s);
  CHECK(result.score == f1_score(result.fit->pruned, truth).f1);
}

TEST_CASE("held-out tuned scale-free fit scores at least the lambda-0 point") {
  std::mt19937_64 rng(16);
  WeightMatrix w = random_weights(10, rng);
  WeightMatrix ho = random_weights(10, rng, -0.1, 0.3);
  std::vector<double> grid = default_lambda_grid(w);
  CHECK(grid.front() == 0.0);
  auto fit_at = [&](double lambda) {
    PriorConfig cfg;
    cfg.lambda = lambda;
    return fit_scalefree(w, cfg, ho);
  };
  auto score = [&](const FitResult& fit) { return holdout_loglik(fit.pruned, ho); };
  auto result = tune(std::span<const double>(grid), fit_at, score);
  double at_zero = score(fit_scalefree(w, PriorConfig{}, ho));
  CHECK(result.score >= at_zero);
  CHECK_THROWS_AS(tune(std::span<const double>{}, fit_at, score), ContractViolation);
}

TEST_CASE("default lambda grid scales with the mean off-diagonal weight") {
  std::mt19937_64 rng(18);
  WeightMatrix w = random_weights(6, rng);
  std::vector<double> grid = default_lambda_grid(w);
  REQUIRE(grid.size() == 8);
  CHECK(grid[0] == 0.0);
  CHECK(grid.back() == Catch::Approx(0.1 * mean_offdiagonal(w)));
}
