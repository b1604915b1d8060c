#include <cmath>

#include "doctest.h"
#include "hypercyc/errors.hpp"
#include "hypercyc/random.hpp"
#include "hypercyc/weighted_space.hpp"

using namespace hypercyc;

namespace {

WeightedVector random_vector(const Group& G, Rng& rng, int radius, int atoms) {
  auto ball = G.ball(radius);
  std::vector<Entry> es;
  for (int i = 0; i < atoms; ++i)
    es.push_back({ball[rng.uniform_int(0, ball.size() - 1)], 2 * rng.uniform() - 1});
  return WeightedVector::from_entries(es);
}

}  // namespace

TEST_SUITE("weighted_space") {
  TEST_CASE("vector arithmetic") {
    auto a = WeightedVector::from_entries({{Element{1}, 2.0}, {Element{-1}, 1.0}, {Element{1}, 1.0}});
    CHECK(a.coef(Element{1}) == 3.0);
    CHECK(a.support_size() == 2);
    auto b = WeightedVector::delta(Element{-1}, 1.0);
    auto d = a - b;
    CHECK(d.support_size() == 1);
    CHECK((a * 2.0).coef(Element{1}) == 6.0);
    CHECK(a.max_abs() == 3.0);
    CHECK((a - a).is_zero());
  }

  TEST_CASE("norm of an atom is sqrt of its weight") {
    Group Z(GroupSpec::integers());
    auto w = build_weight(Z, {0.5, 40});
    for (int k = -5; k <= 5; ++k)
      CHECK(norm(WeightedVector::delta(Element{k}, 3.0), w) == doctest::Approx(3 * std::sqrt(w.weight(Element{k}))));
  }

  TEST_CASE("shift composes as S_g S_h = S_{gh}") {
    Rng rng(5);
    for (auto spec : {GroupSpec::free(2), GroupSpec::heisenberg(), GroupSpec::lattice(2)}) {
      Group G(spec);
      auto ball = G.ball(2);
      for (int t = 0; t < 50; ++t) {
        auto v = random_vector(G, rng, 3, 8);
        auto g = ball[rng.uniform_int(0, ball.size() - 1)];
        auto h = ball[rng.uniform_int(0, ball.size() - 1)];
        CHECK(shift(G, shift(G, v, h), g) == shift(G, v, G.multiply(g, h)));
        for (const auto& e : v.entries()) CHECK(shift(G, v, g).coef(G.multiply(e.element, G.inverse(g))) == e.coef);
      }
    }
  }

  TEST_CASE("inner product is bilinear and matches the norm") {
    Group F2(GroupSpec::free(2));
    auto w = build_weight(F2, {0.5, 8});
    Rng rng(8);
    for (int t = 0; t < 30; ++t) {
      auto a = random_vector(F2, rng, 3, 6), b = random_vector(F2, rng, 3, 6);
      CHECK(inner(a + b, a, w) == doctest::Approx(inner(a, a, w) + inner(b, a, w)));
      CHECK(std::sqrt(inner(a, a, w)) == doctest::Approx(norm(a, w)));
    }
  }

  TEST_CASE("distance bound brackets the exact distance") {
    Group Z(GroupSpec::integers());
    auto w = build_weight(Z, {0.5, 40});
    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
      auto v = random_vector(Z, rng, 10, 5), c = random_vector(Z, rng, 10, 5);
      double exact = norm(v - c, w);
      auto d = distance_bound(v, c, w, 0.0);
      CHECK(d.lo <= exact + 1e-15);
      CHECK(d.hi >= exact);
      CHECK(d.classify(d.hi * 1.01) == Membership::Inside);
      CHECK(d.classify(d.lo * 0.99) == Membership::Outside);
    }
  }

  TEST_CASE("operator norm certificate on Z and F_2") {
    Group Z(GroupSpec::integers()), F2(GroupSpec::free(2));
    auto wz = build_weight(Z, {0.5, 40});
    auto c = operator_norm_certificate(Z, wz, Z.generator(0), 500, 1);
    CHECK(c.pass);
    CHECK(c.bound == doctest::Approx(std::sqrt(6.0)));
    CHECK(c.observed <= c.bound);
    CHECK(c.observed > 1.0);
    CHECK(c.domain_radius == 19);
    auto wf = build_weight(F2, {0.5, 11});
    auto cf = operator_norm_certificate(F2, wf, F2.generator(1, true), 200, 1);
    CHECK(cf.pass);
    CHECK(cf.bound == doctest::Approx(std::sqrt(10.0)));
    CHECK_THROWS_AS(operator_norm_certificate(Z, wz, Element{2}, 10, 1), DomainError);
  }

  TEST_CASE("single atoms attain the ratio sup") {
    Group Z(GroupSpec::integers());
    auto w = build_weight(Z, {0.5, 40});
    auto c = operator_norm_certificate(Z, w, Z.generator(0), 10, 3);
    // ||S_a delta_g||^2 / ||delta_g||^2 = w(g a^-1)/w(g)
    double best = 0;
    for (int k = -19; k <= 19; ++k) best = std::max(best, w.weight(Element{k - 1}) / w.weight(Element{k}));
    CHECK(c.observed_atoms == doctest::Approx(std::sqrt(best)).epsilon(1e-12));
  }
}
