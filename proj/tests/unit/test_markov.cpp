#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hypercyc/errors.hpp"
#include "hypercyc/markov.hpp"

using namespace hypercyc;

TEST_SUITE("markov") {
  TEST_CASE("rotation eigenvalue closed form") {
    Group Z(GroupSpec::integers()), Z2(GroupSpec::lattice(2));
    auto rot = DynamicalSystem::rotation(Z, {std::numbers::sqrt2 - 1}, 1);
    CHECK(rotation_eigenvalue(rot, 0) == doctest::Approx(-0.23882).epsilon(1e-4));
    auto rot2 = DynamicalSystem::rotation(Z2, {0.25, 0.5}, 1);
    CHECK(rotation_eigenvalue(rot2, 0) == doctest::Approx(3.0 / 5));
    CHECK(rotation_eigenvalue(rot2, 1) == doctest::Approx(1.0 / 5));
    CHECK_THROWS_AS(rotation_eigenvalue(DynamicalSystem::bernoulli(Z, 1), 0), DomainError);
  }

  TEST_CASE("cosine is an eigenfunction of every power") {
    Group Z2(GroupSpec::lattice(2));
    auto sys = DynamicalSystem::rotation(Z2, {std::sqrt(5.0) - 2, std::sqrt(8.0) - 2}, 3);
    auto powers = convolution_powers(Z2, step_distribution(Z2), 8);
    for (int i = 0; i < 2; ++i) {
      auto f = Observable::cosine(i);
      double lam = rotation_eigenvalue(sys, i);
      for (int t = 0; t < 20; ++t) {
        auto x = sys.sample(t);
        for (int n = 0; n <= 8; ++n)
          CHECK(markov_average(sys, f, powers[n], x) ==
                doctest::Approx(std::pow(lam, n) * f.eval(sys, x)).epsilon(1e-10).scale(1));
      }
    }
  }

  TEST_CASE("constants are fixed") {
    Group F2(GroupSpec::free(2));
    auto sys = DynamicalSystem::bernoulli(F2, 2);
    auto powers = convolution_powers(F2, step_distribution(F2), 4);
    auto f = Observable::constant(-2.5);
    for (int n = 0; n <= 4; ++n) CHECK(markov_average(sys, f, powers[n], sys.sample(n)) == doctest::Approx(-2.5));
  }

  TEST_CASE("indicator variance matches the sum of squared masses") {
    // A^n 1_{x_0=1}(x) = sum_g rho^n(g) x_g with independent fair bits
    Group Z(GroupSpec::integers());
    auto sys = DynamicalSystem::bernoulli(Z, 12);
    auto powers = convolution_powers(Z, step_distribution(Z), 10);
    auto f = Observable::indicator(*Cylinder::make({{Element{0}, 1}}));
    auto r = jrt_convergence_report(sys, f, powers, 4000, 5, 0.3);
    CHECK(r.contraction);
    CHECK(r.positivity);
    CHECK(r.aperiodicity_witness == doctest::Approx(1.0 / 3));
    REQUIRE(r.rows.size() == 11);
    for (int n = 0; n <= 10; ++n) {
      double s = 0;
      for (const auto& a : powers[n].atoms()) s += a.mass * a.mass;
      CHECK(std::abs(r.rows[n].mean_sq_dev - s / 4) < 5 * r.rows[n].mean_sq_se + 1e-12);
    }
    CHECK(r.rows[10].l2_dev < r.rows[1].l2_dev);
  }

  TEST_CASE("rotation report follows the predicted decay") {
    Group Z(GroupSpec::integers());
    auto sys = DynamicalSystem::rotation(Z, {std::numbers::sqrt2 - 1}, 9);
    auto powers = convolution_powers(Z, step_distribution(Z), 6);
    auto r = jrt_convergence_report(sys, Observable::cosine(0), powers, 3000, 4, 0.01);
    for (int n = 1; n <= 6; ++n) {
      CHECK(r.rows[n].predicted_l2 == doctest::Approx(std::pow(0.238816, n) / std::sqrt(2.0)).epsilon(1e-3));
      CHECK(r.rows[n].ratio == doctest::Approx(std::abs(rotation_eigenvalue(sys, 0))).epsilon(1e-9));
    }
    CHECK(r.converged);
    CHECK(r.pass);
  }
}
