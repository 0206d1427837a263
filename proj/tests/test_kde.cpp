#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fde/datagen.hpp"
#include "fde/kde.hpp"
#include "fde/rng.hpp"

using namespace fde;

namespace {

Eigen::VectorXd uniform_column(int n, std::uint64_t seed) {
  Eigen::VectorXd x(n);
  std::mt19937_64 rng = substream(seed, 0);
  for (int t = 0; t < n; ++t) x(t) = uniform01(rng);
  return x;
}

double grid_integral(const Eigen::VectorXd& col, const KernelConfig& cfg) {
  ColumnKernel ck = resolve_column(col, cfg);
  EvalGrid grid = column_grid(ck, cfg);
  Eigen::VectorXd p = kde_profile(col, cfg.kernel, ck.h1, grid.points, cfg.floor);
  return grid.quad_w.dot(p);
}

}  // namespace

TEST_CASE("config validation") {
  KernelConfig cfg;
  cfg.grid_points = 8;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = KernelConfig{};
  cfg.floor = 1e-3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = KernelConfig{};
  cfg.h1 = Bandwidth::fixed(0.0);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_NOTHROW(KernelConfig{}.validate());
}

TEST_CASE("univariate kde at the kernel center") {
  KernelConfig cfg;
  cfg.h1 = Bandwidth::fixed(1.0);
  Eigen::VectorXd one(1);
  one << 0.0;
  CHECK(kde_univariate(one, cfg, 0.0) == Catch::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-12));

  Eigen::VectorXd two(2);
  two << -1.0, 1.0;
  // both kernels contribute phi(1) at the midpoint
  CHECK(kde_univariate(two, cfg, 0.0) == Catch::Approx(norm_pdf(1.0)).epsilon(1e-12));
}

TEST_CASE("univariate kde recovers the uniform density at the center") {
  KernelConfig cfg;
  Eigen::VectorXd x = uniform_column(1000, 42);
  CHECK(kde_univariate(x, cfg, 0.5) == Catch::Approx(1.0).margin(0.1));
}

TEST_CASE("non-finite data is rejected") {
  KernelConfig cfg;
  Eigen::VectorXd x(3);
  x << 0.1, std::nan(""), 0.3;
  CHECK_THROWS_AS(kde_univariate(x, cfg, 0.0), DataError);
}

TEST_CASE("degenerate column under the plug-in rule is a configuration error") {
  KernelConfig cfg;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(20, 3.7);
  CHECK_THROWS_AS(kde_univariate(x, cfg, 3.7), ConfigError);
}

TEST_CASE("bivariate kde at the kernel center and far away") {
  KernelConfig cfg;
  cfg.h2 = Bandwidth::fixed(1.0);
  Eigen::VectorXd one(1);
  one << 0.0;
  CHECK(kde_bivariate(one, one, cfg, 0.0, 0.0) ==
        Catch::Approx(1.0 / (2.0 * kPi)).epsilon(1e-12));
  // ten bandwidths out, only the clamp is left
  CHECK(kde_bivariate(one, one, cfg, 10.5, 10.5) == cfg.floor);
}

TEST_CASE("bivariate kde of independent uniforms near (0.5, 0.5)") {
  KernelConfig cfg;
  Eigen::VectorXd xi = uniform_column(2000, 7);
  Eigen::VectorXd xj = uniform_column(2000, 8);
  CHECK(kde_bivariate(xi, xj, cfg, 0.5, 0.5) == Catch::Approx(1.0).margin(0.15));
}

TEST_CASE("fitted univariate kde integrates to one on its grid") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    KernelConfig cfg;
    Eigen::VectorXd x = uniform_column(400, seed);
    CHECK(grid_integral(x, cfg) == Catch::Approx(1.0).margin(0.01));
    cfg.kernel = Kernel::epanechnikov;
    CHECK(grid_integral(x, cfg) == Catch::Approx(1.0).margin(0.01));
  }
}

TEST_CASE("fitted bivariate kde integrates to one on its grid") {
  KernelConfig cfg;
  Eigen::VectorXd xi = uniform_column(300, 21);
  Eigen::VectorXd xj = uniform_column(300, 22);
  ColumnKernel ci = resolve_column(xi, cfg), cj = resolve_column(xj, cfg);
  EvalGrid gi = column_grid(ci, cfg), gj = column_grid(cj, cfg);
  Eigen::MatrixXd ai = kernel_matrix(xi, cfg.kernel, ci.h2, gi.points);
  Eigen::MatrixXd aj = kernel_matrix(xj, cfg.kernel, cj.h2, gj.points);
  Eigen::MatrixXd joint = (ai.transpose() * aj) / static_cast<double>(xi.size());
  double integral = gi.quad_w.transpose() * joint * gj.quad_w;
  CHECK(integral == Catch::Approx(1.0).margin(0.02));
}

TEST_CASE("epanechnikov kernel has compact support") {
  CHECK(kernel_value(Kernel::epanechnikov, 0.0) == Catch::Approx(0.75));
  CHECK(kernel_value(Kernel::epanechnikov, 1.01) == 0.0);
  CHECK(kernel_value(Kernel::epanechnikov, -0.5) == Catch::Approx(0.75 * 0.75));
}
