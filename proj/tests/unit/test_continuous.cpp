#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hypercyc/continuous.hpp"
#include "hypercyc/errors.hpp"
#include "hypercyc/feldman.hpp"

using namespace hypercyc;

TEST_SUITE("continuous") {
  TEST_CASE("overlap length in closed form and by quadrature") {
    IntervalMeasure L{2.0};
    CHECK(overlap_density(L, 0) == doctest::Approx(4.0));
    CHECK(overlap_density(L, 3) == doctest::Approx(1.0));
    CHECK(overlap_density(L, -3) == doctest::Approx(1.0));
    CHECK(overlap_density(L, 4) == doctest::Approx(0.0));
    CHECK(overlap_density(L, 5) == 0.0);
    for (double t = -4.5; t <= 4.5; t += 0.37)
      CHECK(overlap_quadrature(L, t) == doctest::Approx(overlap_density(L, t)).epsilon(1e-10).scale(1));
  }

  TEST_CASE("piecewise integral handles jumps") {
    auto step = [](double x) { return x < 0.3 ? 1.0 : (x < 0.71 ? x * x : 0.0); };
    double want = 0.3 + (0.71 * 0.71 * 0.71 - 0.3 * 0.3 * 0.3) / 3;
    CHECK(piecewise_integral(step, 0, 1) == doctest::Approx(want).epsilon(1e-9));
    CHECK(piecewise_integral([](double x) { return std::sin(x); }, 0, std::numbers::pi) ==
          doctest::Approx(2.0).epsilon(1e-13));
  }

  TEST_CASE("real line domination with k = 1, l = 2") {
    auto r = domination_constant_real(1.0, 2.0, 1e-3, 2000);
    CHECK(r.u_closed == doctest::Approx(1.0));
    CHECK(r.u_grid == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.D == doctest::Approx(2.0));
    CHECK(r.norm_bound == doctest::Approx(2.0));
    CHECK(r.window_violations == 0);
    CHECK(r.quad_max_error < 1e-9);
    // near the edge of the support the density ratio reaches 4
    CHECK(r.support_tight_D == doctest::Approx(4.0).epsilon(1e-2));
    CHECK(r.support_D_corrected == doctest::Approx(8.0));
    CHECK(r.corrected_violations == 0);
    CHECK(r.pass);
  }

  TEST_CASE("Feldman embedding intertwines the rotation") {
    const double a = std::numbers::sqrt2 - 1;
    FeldmanEmbedding F{a, 12};
    auto u = F.phi(0.3);
    REQUIRE(u.size() == 12);
    CHECK(u[0][0] == doctest::Approx(0.5 * std::cos(2 * std::numbers::pi * (0.3 + a))));
    auto deeper = FeldmanEmbedding{a, 13}.phi(0.3);
    auto Tu = FeldmanEmbedding::apply_T(deeper);
    auto moved = F.phi(F.rotate(0.3));
    REQUIRE(Tu.size() == moved.size());
    for (std::size_t n = 0; n < moved.size(); ++n) {
      CHECK(Tu[n][0] == doctest::Approx(moved[n][0]).epsilon(1e-12).scale(1));
      CHECK(Tu[n][1] == doctest::Approx(moved[n][1]).epsilon(1e-12).scale(1));
    }
    auto rep = feldman_baseline(a, 30, 500, 3);
    CHECK(rep.pass);
    CHECK(rep.predicted_norm_sq == doctest::Approx((1 - std::pow(4.0, -30)) / 3));
  }

  TEST_CASE("chain masses") {
    LocallyFiniteChain c;
    c.n_max = 10;
    c.params = {0.5, 10};
    auto rho = chain_rho_masses(c);
    REQUIRE(rho.size() == 1024);
    double e = 0, e2 = 0, total = 0;
    for (int n = 1; n <= 10; ++n) {
      e += c.params.p(n) * std::ldexp(1.0, -n);
      if (n >= 2) e2 += c.params.p(n) * std::ldexp(1.0, -n);
    }
    for (double m : rho) total += m;
    CHECK(rho[0] == doctest::Approx(e).epsilon(1e-14));
    CHECK(rho[2] == doctest::Approx(e2).epsilon(1e-14));
    CHECK(rho[3] == doctest::Approx(e2).epsilon(1e-14));
    CHECK(total == doctest::Approx(1 - std::pow(0.5, 10)).epsilon(1e-14));
    CHECK(LocallyFiniteChain::level(0) == 1);
    CHECK(LocallyFiniteChain::level(1) == 1);
    CHECK(LocallyFiniteChain::level(2) == 2);
    CHECK(LocallyFiniteChain::level(5) == 3);
    CHECK(element_to_mask(mask_to_element(0b1011)) == 0b1011);
    Group S(GroupSpec::locally_finite());
    auto sm = locally_finite_rho(S, c);
    CHECK(sm.mass(S.identity()) == doctest::Approx(e).epsilon(1e-14));
  }

  TEST_CASE("xor convolution matches the direct sum") {
    std::vector<double> a(16), b(16);
    for (int i = 0; i < 16; ++i) {
      a[i] = 1.0 / (i + 1);
      b[i] = std::sin(i + 1.0);
    }
    auto c = xor_convolve(a, b);
    for (int g = 0; g < 16; ++g) {
      double s = 0;
      for (int h = 0; h < 16; ++h) s += a[g ^ h] * b[h];
      CHECK(c[g] == doctest::Approx(s).epsilon(1e-14));
    }
  }

  TEST_CASE("stated constants hold near the identity") {
    LocallyFiniteChain c;
    c.n_max = 4;
    c.params = {0.5, 4};
    CHECK(stated_domination_constant(c, 1) == doctest::Approx(3.0));
    CHECK(stated_domination_constant(c, 2) == doctest::Approx(4.0));
    auto rho = chain_rho_masses(c);
    auto rho2 = xor_convolve(rho, rho);
    auto d0 = domination_check_locally_finite(c, rho, rho2, 0);
    CHECK(d0.C_stated == doctest::Approx(3.0));
    CHECK(d0.violations == 0);
    auto d2 = domination_check_locally_finite(c, rho, rho2, 2);
    CHECK(d2.m0 == 2);
    CHECK(d2.C_stated == doctest::Approx(4.0));
    CHECK(d2.violations == 0);
  }

  TEST_CASE("corrected constant holds for every g0 in K_10") {
    LocallyFiniteChain c;
    c.n_max = 10;
    c.params = {0.5, 10};
    auto rho = chain_rho_masses(c);
    auto rho2 = xor_convolve(rho, rho);
    std::size_t stated_bad = 0;
    for (std::uint64_t g0 = 0; g0 < 1024; ++g0) {
      auto d = domination_check_locally_finite(c, rho, rho2, g0);
      CHECK(d.corrected_violations == 0);
      CHECK(d.best <= d.C_corrected * (1 + 1e-12));
      stated_bad += d.violations > 0;
    }
    // the bound 1/p_1 + 2^{m0-1} fails at deep levels
    CHECK(stated_bad > 0);
  }

  TEST_CASE("lambda identity and lower bound in the report") {
    LocallyFiniteChain c;
    c.n_max = 8;
    c.params = {0.5, 8};
    auto r = locally_finite_report(c, 10, 1);
    CHECK(r.lambda_ok);
    CHECK(r.lambda_max_error < 1e-14);
    CHECK(r.lower_bound_violations == 0);
    CHECK(r.rows.size() == 10);
  }
}
