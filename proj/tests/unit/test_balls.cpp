#include "doctest.h"
#include "hypercyc/balls.hpp"
#include "hypercyc/errors.hpp"
#include "hypercyc/random.hpp"

using namespace hypercyc;

TEST_SUITE("balls") {
  TEST_CASE("cantor pairing round trips") {
    for (std::uint64_t k = 0; k < 5000; ++k) {
      auto [a, b] = cantor_unpair(k);
      CHECK(cantor_pair(a, b) == k);
    }
    Rng rng(1);
    for (int t = 0; t < 1000; ++t) {
      std::uint64_t a = rng.uniform_int(0, 1 << 30), b = rng.uniform_int(0, 1 << 30);
      CHECK(cantor_unpair(cantor_pair(a, b)) == std::pair{a, b});
    }
    CHECK(cantor_unpair(0) == std::pair<std::uint64_t, std::uint64_t>{0, 0});
    CHECK(cantor_unpair(2) == std::pair<std::uint64_t, std::uint64_t>{0, 1});
  }

  TEST_CASE("zigzag") {
    CHECK(zigzag_decode(0) == 0);
    CHECK(zigzag_decode(1) == 1);
    CHECK(zigzag_decode(2) == -1);
    CHECK(zigzag_decode(3) == 2);
    for (std::int64_t j = -1000; j <= 1000; ++j) CHECK(zigzag_decode(zigzag_encode(j)) == j);
  }

  TEST_CASE("first ball descriptors") {
    Group Z(GroupSpec::integers());
    BallBasis B(Z);
    auto b0 = B.ball(0);
    CHECK(b0.center.is_zero());
    CHECK(b0.radius == 1.0);
    auto b1 = B.ball(1);
    CHECK(b1.center == WeightedVector::delta(Element{0}, 1.0));
    CHECK(b1.radius == 1.0);
    auto b2 = B.ball(2);
    CHECK(b2.center.is_zero());
    CHECK(b2.radius == 0.5);
    auto b3 = B.ball(3);
    CHECK(b3.center == WeightedVector::delta(Element{0}, -1.0));
    CHECK(b3.radius == 1.0);
  }

  TEST_CASE("index inverts describe") {
    for (auto spec : {GroupSpec::integers(), GroupSpec::free(2), GroupSpec::lattice(2)}) {
      Group G(spec);
      BallBasis B(G);
      for (std::uint64_t k = 0; k < 3000; ++k) CHECK(B.index(B.describe(k)) == k);
      Rng rng(2);
      for (int t = 0; t < 500; ++t) {
        std::uint64_t k = cantor_pair(rng.bits() % B.center_count(), rng.uniform_int(0, 60));
        CHECK(B.index(B.describe(k)) == k);
      }
    }
  }

  TEST_CASE("realized centers are dyadic on the level ball") {
    Group Z2(GroupSpec::lattice(2));
    BallBasis B(Z2);
    BallDescriptor d{1, {0, 3, -4, 1, 0}, 5};
    auto s = B.realize(d);
    CHECK(s.radius == 1.0 / 32);
    CHECK(s.support_radius == 1);
    CHECK(s.center.support_size() == 3);
    for (const auto& e : s.center.entries()) CHECK(Z2.word_length(e.element) <= 1);
    CHECK(B.describe(B.index(d)) == d);
    BallDescriptor bad{1, {0, 5, 0, 0, 0}, 0};
    CHECK_THROWS_AS(B.index(bad), DomainError);
  }
}
