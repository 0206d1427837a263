#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fde/math.hpp"

using namespace fde;

TEST_CASE("normal cdf matches reference values") {
  struct Ref { double x, p; };
  const Ref refs[] = {
      {-8.0, 6.220960574271784e-16}, {-3.0, 0.0013498980316300946},
      {-1.0, 0.15865525393145705},   {0.5, 0.6914624612740131},
      {2.0, 0.9772498680518208},     {6.0, 0.9999999990134123},
  };
  for (const Ref& r : refs)
    CHECK(norm_cdf(r.x) == Catch::Approx(r.p).epsilon(0).margin(1e-15 + 1e-12 * r.p));
}

TEST_CASE("normal quantile is accurate and inverts the cdf") {
  struct Ref { double p, x; };
  const Ref refs[] = {
      {1e-09, -5.9978070150076865},   {0.0001, -3.7190164854556804},
      {0.025, -1.9599639845400543},   {0.3, -0.5244005127080408},
      {0.5, 0.0},                     {0.9772498680518208, 2.0},
      {0.999999, 4.753424308817087},
  };
  for (const Ref& r : refs)
    CHECK(norm_quantile(r.p) == Catch::Approx(r.x).epsilon(0).margin(1e-10));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(1e-12, 1.0 - 1e-12);
  for (int k = 0; k < 2000; ++k) {
    double p = unif(rng);
    CHECK(norm_cdf(norm_quantile(p)) == Catch::Approx(p).epsilon(0).margin(1e-12));
  }
}

TEST_CASE("student t cdf matches reference values and the cauchy identity") {
  struct Ref { double nu, x, p; };
  const Ref refs[] = {
      {1, 0.5, 0.6475836176504333},     {1, -2.0, 0.1475836176504332},
      {2, 1.5, 0.8638034375544995},     {3, -0.7, 0.2671634991523818},
      {4, 2.5, 0.966616727594006},      {7, 0.3, 0.6135549747989328},
      {1.5, 1.1, 0.7915501876926831},   {12.5, -0.9, 0.19256556045745327},
  };
  for (const Ref& r : refs)
    CHECK(student_t_cdf(r.x, r.nu) == Catch::Approx(r.p).epsilon(0).margin(1e-10));
  for (double x : {-3.0, -0.2, 0.0, 1.7, 10.0})
    CHECK(student_t_cdf(x, 1.0) ==
          Catch::Approx(0.5 + std::atan(x) / kPi).epsilon(0).margin(1e-15));
}

TEST_CASE("student t quantile inverts the cdf to 1e-8") {
  struct Ref { double nu, p, x; };
  const Ref refs[] = {
      {1, 0.9, 3.0776835372078066},    {2, 0.025, -4.302652729696144},
      {3, 0.6, 0.27667066233268983},   {4, 0.999, 7.173182219782318},
      {7, 0.3, -0.5491096579472403},   {1.5, 0.75, 0.8725946625416114},
      {12.5, 0.01, -2.664962001395776},
  };
  for (const Ref& r : refs)
    CHECK(student_t_quantile(r.p, r.nu) ==
          Catch::Approx(r.x).epsilon(1e-10).margin(1e-8));
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unif(1e-6, 1.0 - 1e-6);
  for (double nu : {1.0, 2.0, 3.0, 5.5, 30.0}) {
    for (int k = 0; k < 400; ++k) {
      double p = unif(rng);
      double x = student_t_quantile(p, nu);
      CHECK(student_t_cdf(x, nu) == Catch::Approx(p).epsilon(0).margin(1e-10));
    }
  }
}

TEST_CASE("incomplete beta matches reference values") {
  struct Ref { double a, b, x, v; };
  const Ref refs[] = {
      {0.5, 0.5, 0.3, 0.36901011956554536},
      {2, 3, 0.5, 0.6875},
      {0.5, 6.25, 0.1, 0.7394590507117884},
      {8, 2, 0.9, 0.7748409780000002},
  };
  for (const Ref& r : refs)
    CHECK(betainc(r.a, r.b, r.x) == Catch::Approx(r.v).epsilon(1e-12));
  CHECK(betainc(2.0, 3.0, 0.0) == 0.0);
  CHECK(betainc(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("digamma matches the harmonic recurrence at integers") {
  // psi(n) = -gamma + sum_{k<n} 1/k
  double harmonic = 0.0;
  for (int n = 1; n <= 25; ++n) {
    CHECK(digamma(static_cast<double>(n)) ==
          Catch::Approx(-kEulerGamma + harmonic).epsilon(0).margin(1e-12));
    harmonic += 1.0 / n;
  }
  struct Ref { double x, v; };
  const Ref refs[] = {
      {0.5, -1.9635100260214235}, {1.0, -0.5772156649015329},
      {2.0, 0.42278433509846713}, {4.3, 1.3378527920899248},
      {11.0, 2.351752589066721},  {21.0, 3.020523992242149},
      {0.1, -10.423754940411076},
  };
  for (const Ref& r : refs)
    CHECK(digamma(r.x) == Catch::Approx(r.v).epsilon(0).margin(1e-12));
  // psi(x+1) = psi(x) + 1/x
  for (double x : {0.3, 1.7, 5.2, 9.9})
    CHECK(digamma(x + 1.0) == Catch::Approx(digamma(x) + 1.0 / x).epsilon(0).margin(1e-12));
}

TEST_CASE("lbeta identity B(1,n) = 1/n") {
  for (int n = 1; n <= 10; ++n)
    CHECK(lbeta(1.0, static_cast<double>(n)) ==
          Catch::Approx(std::log(1.0 / n)).epsilon(0).margin(1e-13));
}

TEST_CASE("kolmogorov survival function matches reference values") {
  struct Ref { double lam, q; };
  const Ref refs[] = {
      {0.5, 0.9639452436648751},  {1.0, 0.26999967167735456},
      {1.63, 0.009846364888486529}, {2.0, 0.0006709252557796953},
  };
  for (const Ref& r : refs)
    CHECK(kolmogorov_sf(r.lam) == Catch::Approx(r.q).epsilon(1e-10));
}

TEST_CASE("ks statistic detects uniform vs shifted samples") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> u(4000);
  for (auto& v : u) v = unif(rng);
  CHECK(ks_pvalue(ks_statistic_uniform(u), u.size()) > 0.01);
  for (auto& v : u) v = 0.5 * v;  // clearly not uniform(0,1)
  CHECK(ks_pvalue(ks_statistic_uniform(u), u.size()) < 1e-6);
}

TEST_CASE("spearman handles ties and monotone transforms") {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  std::vector<double> y{2.0, 4.0, 6.0, 8.0, 10.0, 12.0};
  CHECK(spearman(x, y) == Catch::Approx(1.0));
  std::vector<double> z{12.0, 10.0, 8.0, 6.0, 4.0, 2.0};
  CHECK(spearman(x, z) == Catch::Approx(-1.0));
  // rank correlation is invariant under strictly increasing maps
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  std::vector<double> a(300), b(300), ta(300);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = gauss(rng);
    b[i] = a[i] + gauss(rng);
    ta[i] = std::exp(a[i]);
  }
  CHECK(spearman(a, b) == Catch::Approx(spearman(ta, b)).epsilon(1e-12));
}
