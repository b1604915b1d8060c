#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hypercyc/dynamics.hpp"
#include "hypercyc/errors.hpp"
#include "hypercyc/random.hpp"
#include "hypercyc/stats.hpp"

using namespace hypercyc;

TEST_SUITE("dynamics") {
  TEST_CASE("cylinders") {
    Group Z(GroupSpec::integers());
    CHECK(!Cylinder::make({{Element{0}, 1}, {Element{0}, 0}}));
    auto c = *Cylinder::make({{Element{2}, 1}, {Element{0}, 0}, {Element{2}, 1}});
    CHECK(c.bits() == 2);
    CHECK(c.measure() == 0.25);
    CHECK(c.conds().front().first == Element{0});
    auto t = c.translated(Z, Element{3});
    CHECK(t.conds()[0].first == Element{-3});
    CHECK(t.conds()[1].first == Element{-1});
    CHECK(t.translated(Z, Element{-3}) == c);
    CHECK(!c.intersect(*Cylinder::make({{Element{2}, 0}})));
    CHECK_THROWS_AS(Cylinder::make({{Element{0}, 2}}), DomainError);
  }

  TEST_CASE("act composes and matches translated cylinders") {
    Rng rng(4);
    for (auto spec : {GroupSpec::integers(), GroupSpec::lattice(2), GroupSpec::free(2)}) {
      Group G(spec);
      auto sys = DynamicalSystem::bernoulli(G, 17);
      auto ball = G.ball(2);
      auto pick = [&] { return ball[rng.uniform_int(0, ball.size() - 1)]; };
      for (int t = 0; t < 100; ++t) {
        auto x = sys.sample(t);
        auto g = pick(), h = pick(), p = pick();
        CHECK(sys.bit(sys.act(g, sys.act(h, x)), p) == sys.bit(sys.act(G.multiply(g, h), x), p));
        if (p == G.identity()) continue;
        auto c = *Cylinder::make({{p, 1}, {G.identity(), 0}});
        CHECK(sys.in(c.translated(G, g), sys.act(g, x)) == sys.in(c, x));
      }
    }
  }

  TEST_CASE("Bernoulli coordinates are fair and sample_in conditions") {
    Group Z2(GroupSpec::lattice(2));
    auto sys = DynamicalSystem::bernoulli(Z2, 99);
    const int n = 20000;
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += sys.bit(sys.sample(i), Element{1, -2});
    auto ci = clopper_pearson(ones, n, 0.999);
    CHECK(ci.contains(0.5));
    auto c = *Cylinder::make({{Element{0, 0}, 1}, {Element{1, 0}, 0}, {Element{0, 3}, 1}});
    int outside_hits = 0;
    for (int i = 0; i < 2000; ++i) {
      auto x = sys.sample_in(i, c);
      REQUIRE(sys.in(c, x));
      outside_hits += sys.bit(x, Element{5, 5});
    }
    CHECK(clopper_pearson(outside_hits, 2000, 0.999).contains(0.5));
  }

  TEST_CASE("shifts preserve cylinder frequencies") {
    Rng rng(11);
    Group F2(GroupSpec::free(2));
    auto sys = DynamicalSystem::bernoulli(F2, 23);
    auto ball = F2.ball(2);
    for (int t = 0; t < 5; ++t) {
      auto g = ball[rng.uniform_int(0, ball.size() - 1)];
      auto c = *Cylinder::make({{ball[rng.uniform_int(0, ball.size() - 1)], 1},
                                {ball[rng.uniform_int(0, ball.size() - 1)], 0}});
      const int n = 20000;
      int hits = 0;
      for (int i = 0; i < n; ++i) hits += sys.in(c, sys.act(g, sys.sample(i)));
      CHECK(clopper_pearson(hits, n, 0.999).contains(c.measure()));
    }
  }

  TEST_CASE("non-identity shifts move sampled points") {
    for (auto spec : {GroupSpec::integers(), GroupSpec::lattice(2), GroupSpec::free(2)}) {
      Group G(spec);
      auto sys = DynamicalSystem::bernoulli(G, 5);
      // wide enough that a chance agreement is negligible
      int r = 1;
      while (G.ball(r).size() < 130) ++r;
      auto window = G.ball(r);
      for (int i = 0; i < 200; ++i) {
        auto x = sys.sample(i);
        for (const auto& g : G.ball(2)) {
          if (g == G.identity()) continue;
          auto y = sys.act(g, x);
          bool differs = false;
          for (const auto& p : window)
            if (sys.bit(x, p) != sys.bit(y, p)) {
              differs = true;
              break;
            }
          CHECK(differs);
        }
      }
    }
  }

  TEST_CASE("rotation angles are uniform and shift by alpha") {
    Group Z(GroupSpec::integers());
    const double a = std::numbers::sqrt2 - 1;
    auto sys = DynamicalSystem::rotation(Z, {a}, 5);
    std::vector<double> xs;
    for (int i = 0; i < 10000; ++i) {
      auto x = sys.sample(i);
      xs.push_back(sys.angle(x, 0));
      double moved = sys.angle(sys.act(Element{3}, x), 0);
      double want = std::fmod(sys.angle(x, 0) + 3 * a, 1.0);
      CHECK(std::abs(moved - want) < 1e-12);
    }
    CHECK(ks_uniform_statistic(xs) < ks_critical(xs.size(), 0.01));
    CHECK_THROWS_AS(sys.in(Cylinder{}, sys.sample(0)), DomainError);
  }

  TEST_CASE("set family schedule revisits every descriptor") {
    Group Z(GroupSpec::integers());
    SetFamily fam(Z);
    CHECK(SetFamily::schedule(1) == 0);
    CHECK(SetFamily::schedule(2) == 1);
    CHECK(SetFamily::schedule(12) == 2);
    CHECK(SetFamily::schedule(std::uint64_t{1} << 40) == 40);
    CHECK_THROWS_AS(SetFamily::schedule(0), DomainError);
    // B_0 = {0}: codes 1, 2 give x_0 = 1, x_0 = 0
    CHECK(fam.descriptor(0) == *Cylinder::make({{Element{0}, 1}}));
    CHECK(fam.descriptor(1) == *Cylinder::make({{Element{0}, 0}}));
    // first level-1 descriptor sits after the two level-0 ones
    CHECK(fam.descriptor(2).bits() == 1);
    CHECK(fam.descriptor(2 + 26 - 1).bits() == 3);
    for (std::uint64_t d = 0; d < 200; ++d) CHECK(fam.descriptor(d).bits() >= 1);
    CHECK(fam.set(6) == fam.descriptor(1));
  }

  TEST_CASE("Rokhlin tower on Z") {
    Group Z(GroupSpec::integers());
    auto sys = DynamicalSystem::bernoulli(Z, 3);
    TowerOptions opt;
    opt.samples = 20000;
    opt.conditional_samples = 2000;
    opt.seed = 1;
    auto t = rokhlin_tower(sys, 3, 0.2, opt);
    CHECK(t.marker == 7);
    CHECK(t.exact_disjoint);
    CHECK(t.collisions == 0);
    CHECK(t.conditional_collisions == 0);
    CHECK(t.tower_measure == doctest::Approx(7.0 / 256));
    CHECK(t.pass);
    // every point lies in at most one translate, and locate finds it
    for (int i = 0; i < 3000; ++i) {
      auto x = sys.sample(i);
      int count = 0;
      for (const auto& tr : t.translates) count += sys.in(tr, x);
      CHECK(count <= 1);
      auto where = t.locate(sys, x);
      CHECK(where.has_value() == (count == 1));
      if (where) CHECK(sys.in(t.base, sys.act(Z.inverse(t.ball[*where]), x)));
    }
  }

  TEST_CASE("tower errors suggest a marker") {
    Group Z(GroupSpec::integers());
    auto sys = DynamicalSystem::bernoulli(Z, 3);
    TowerOptions opt;
    opt.marker = 2;
    try {
      rokhlin_tower(sys, 3, 0.2, opt);
      FAIL("expected TowerError");
    } catch (const TowerError& e) {
      CHECK(e.suggested_marker == 7);
    }
    TowerOptions tight;
    tight.max_marker_bits = 4;
    CHECK_THROWS_AS(rokhlin_tower(sys, 3, 0.2, tight), TowerError);
    Group F2(GroupSpec::free(2));
    CHECK_THROWS_AS(rokhlin_tower(DynamicalSystem::bernoulli(F2, 1), 1, 0.2, {}), DomainError);
  }

  TEST_CASE("box tower on Z^2 inside a cylinder") {
    Group Z2(GroupSpec::lattice(2));
    auto sys = DynamicalSystem::bernoulli(Z2, 8);
    TowerOptions opt;
    opt.within = *Cylinder::make({{Element{7, 7}, 1}});
    auto t = rokhlin_tower(sys, 1, 0.3, opt);
    CHECK(t.kind == "box");
    CHECK(t.exact_disjoint);
    CHECK(t.pass);
    for (const auto& c : opt.within->conds()) CHECK(std::find(t.base.conds().begin(), t.base.conds().end(), c) != t.base.conds().end());
  }
}
