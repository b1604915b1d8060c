#include <cmath>
#include <vector>

#include "doctest.h"
#include "hypercyc/random.hpp"
#include "hypercyc/stats.hpp"

using namespace hypercyc;

TEST_SUITE("random_stats") {
  TEST_CASE("seed derivation is a pure function") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
    Rng a(derive_seed(5, 0, 0)), b(derive_seed(5, 0, 0));
    for (int i = 0; i < 100; ++i) CHECK(a.bits() == b.bits());
  }

  TEST_CASE("uniform draws pass a KS test and stay in [0,1)") {
    Rng rng(123);
    std::vector<double> xs(20000);
    for (auto& x : xs) {
      x = rng.uniform();
      REQUIRE(x >= 0.0);
      REQUIRE(x < 1.0);
    }
    CHECK(ks_uniform_statistic(xs) < ks_critical(xs.size(), 0.001));
  }

  TEST_CASE("uniform_int covers its range evenly") {
    Rng rng(9);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
      auto v = rng.uniform_int(-3, 3);
      REQUIRE(v >= -3);
      REQUIRE(v <= 3);
      ++counts[v + 3];
    }
    // chi-square with 6 degrees of freedom; 22.46 is the 0.999 quantile
    double chi = 0;
    for (int c : counts) chi += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
    CHECK(chi < 22.46);
  }

  TEST_CASE("Clopper-Pearson against closed forms") {
    // zero successes: upper end solves (1-p)^n = alpha/2
    auto ci = clopper_pearson(0, 10, 0.95);
    CHECK(ci.lo == 0.0);
    CHECK(ci.hi == doctest::Approx(1 - std::pow(0.025, 0.1)).epsilon(1e-12));
    auto full = clopper_pearson(10, 10, 0.95);
    CHECK(full.hi == 1.0);
    CHECK(full.lo == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-12));
    CHECK(binomial_upper(0, 1000, 0.95) == doctest::Approx(1 - std::pow(0.05, 1e-3)).epsilon(1e-12));
    CHECK(binomial_lower(1000, 1000, 0.95) == doctest::Approx(std::pow(0.05, 1e-3)).epsilon(1e-12));
    auto mid = clopper_pearson(50, 100, 0.95);
    CHECK(mid.lo == doctest::Approx(0.39832).epsilon(1e-4));
    CHECK(mid.hi == doctest::Approx(0.60168).epsilon(1e-4));
  }

  TEST_CASE("normal quantiles") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
  }

  TEST_CASE("mean estimate") {
    std::vector<double> xs = {1, 2, 3, 4};
    auto m = mean_estimate(xs);
    CHECK(m.mean == 2.5);
    CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(m.n == 4);
  }

  TEST_CASE("KS statistic of an evenly spaced sample") {
    std::vector<double> xs;
    for (int i = 0; i < 100; ++i) xs.push_back((i + 0.5) / 100);
    CHECK(ks_uniform_statistic(xs) == doctest::Approx(0.005));
    CHECK(ks_critical(100, 0.05) == doctest::Approx(std::sqrt(-std::log(0.025) / 2) / 10));
  }
}
