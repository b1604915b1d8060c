#include <array>
#include <map>
#include <set>

#include "doctest.h"
#include "hypercyc/errors.hpp"
#include "hypercyc/group.hpp"
#include "hypercyc/random.hpp"

using namespace hypercyc;

namespace {

// random element as a product of random generators, then reduced
Element random_word(const Group& G, Rng& rng, int len) {
  Element g = G.identity();
  const auto& gens = G.generators();
  for (int i = 0; i < len; ++i) g = G.multiply(g, gens[rng.uniform_int(0, gens.size() - 1)]);
  return g;
}

std::vector<Group> fg_groups() {
  return {Group(GroupSpec::integers()), Group(GroupSpec::lattice(2)), Group(GroupSpec::lattice(3)),
          Group(GroupSpec::free(1)),    Group(GroupSpec::free(2)),    Group(GroupSpec::heisenberg())};
}

using Mat = std::array<std::int64_t, 9>;
Mat matmul(const Mat& a, const Mat& b) {
  Mat c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[3 * i + j] += a[3 * i + k] * b[3 * k + j];
  return c;
}

}  // namespace

TEST_SUITE("group") {
  TEST_CASE("ball sizes match closed forms") {
    Group Z(GroupSpec::integers()), Z2(GroupSpec::lattice(2)), Z3(GroupSpec::lattice(3)),
        F2(GroupSpec::free(2));
    for (int n = 0; n <= 6; ++n) {
      CHECK(Z.ball(n).size() == static_cast<std::size_t>(2 * n + 1));
      CHECK(Z2.ball(n).size() == static_cast<std::size_t>(2 * n * n + 2 * n + 1));
      CHECK(Z3.ball(n).size() == static_cast<std::size_t>((2 * n + 1) * (2 * n * n + 2 * n + 3) / 3));
      std::size_t pow3 = 1;
      for (int i = 0; i < n; ++i) pow3 *= 3;
      CHECK(F2.ball(n).size() == 2 * pow3 - 1);
    }
    CHECK(F2.ball(11).size() == 354293);
    CHECK_THROWS_AS(F2.ball(12), CapacityError);
  }

  TEST_CASE("Heisenberg agrees with unitriangular matrices") {
    Group H(GroupSpec::heisenberg());
    const Mat I{1, 0, 0, 0, 1, 0, 0, 0, 1};
    const std::vector<Mat> gens = {{1, 1, 0, 0, 1, 0, 0, 0, 1}, {1, -1, 0, 0, 1, 0, 0, 0, 1},
                                   {1, 0, 0, 0, 1, 1, 0, 0, 1}, {1, 0, 0, 0, 1, -1, 0, 0, 1}};
    // breadth-first word lengths on matrices
    std::map<Mat, int> dist{{I, 0}};
    std::vector<Mat> frontier{I};
    for (int r = 1; r <= 4; ++r) {
      std::vector<Mat> next;
      for (const auto& m : frontier)
        for (const auto& s : gens) {
          Mat p = matmul(m, s);
          if (dist.emplace(p, r).second) next.push_back(p);
        }
      frontier = std::move(next);
      CHECK(H.ball(r).size() == dist.size());
    }
    const std::vector<std::size_t> known = {1, 5, 17, 53, 135};
    for (int r = 0; r <= 4; ++r) CHECK(H.ball(r).size() == known[r]);
    for (const auto& [m, d] : dist) {
      Element g{m[1], m[5], m[2]};
      CHECK(H.word_length(g) == d);
    }
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
      Element a = random_word(H, rng, 6), b = random_word(H, rng, 6);
      Mat ma{1, a[0], a[2], 0, 1, a[1], 0, 0, 1}, mb{1, b[0], b[2], 0, 1, b[1], 0, 0, 1};
      Mat mc = matmul(ma, mb);
      Element c = H.multiply(a, b);
      CHECK(c == Element{mc[1], mc[5], mc[2]});
    }
  }

  TEST_CASE("group axioms on random words") {
    Rng rng(11);
    for (const auto& G : fg_groups()) {
      for (int t = 0; t < 300; ++t) {
        Element a = random_word(G, rng, 7), b = random_word(G, rng, 7), c = random_word(G, rng, 7);
        CHECK(G.multiply(G.multiply(a, b), c) == G.multiply(a, G.multiply(b, c)));
        CHECK(G.multiply(a, G.inverse(a)) == G.identity());
        CHECK(G.multiply(G.identity(), a) == a);
        CHECK(G.is_canonical(a));
        CHECK(G.parse(G.format(a)) == a);
        CHECK(G.word_length(G.inverse(a)) == G.word_length(a));
        CHECK(G.word_length(G.multiply(a, b)) <= G.word_length(a) + G.word_length(b));
        CHECK(G.power(a, 3) == G.multiply(a, G.multiply(a, a)));
        CHECK(G.power(a, -2) == G.inverse(G.multiply(a, a)));
      }
    }
  }

  TEST_CASE("balls are sorted, unique and exactly the elements of bounded length") {
    for (const auto& G : fg_groups()) {
      auto b = G.ball(3);
      CHECK(std::is_sorted(b.begin(), b.end()));
      CHECK(std::adjacent_find(b.begin(), b.end()) == b.end());
      for (const auto& g : b) CHECK(G.word_length(g) <= 3);
    }
  }

  TEST_CASE("free group reduction and encodings") {
    Group F2(GroupSpec::free(2));
    CHECK(F2.format(F2.identity()) == "e");
    Element ab = F2.parse("aB");
    CHECK(ab == Element{1, -2});
    CHECK(F2.multiply(ab, F2.parse("ba")) == F2.parse("aa"));
    CHECK(F2.canonicalize(Element{1, -1, 2}) == Element{2});
    CHECK_THROWS_AS(F2.validate(Element{1, -1}), EncodingError);
    CHECK_THROWS_AS(F2.validate(Element{3}), EncodingError);
    CHECK(F2.word_length(F2.parse("abAB")) == 4);
  }

  TEST_CASE("locally finite group is bitwise xor") {
    Group S(GroupSpec::locally_finite());
    Element a = S.parse("{0,3}"), b = S.parse("{3,5}");
    CHECK(S.multiply(a, b) == S.parse("{0,5}"));
    CHECK(S.inverse(a) == a);
    CHECK(S.multiply(a, a) == S.identity());
    CHECK_THROWS_AS(S.word_length(a), DomainError);
    CHECK(S.canonicalize(Element{3, 1, 3}) == Element{1});
  }

  TEST_CASE("rank limits") {
    CHECK_THROWS_AS(Group(GroupSpec::lattice(4)), DomainError);
    CHECK_THROWS_AS(Group(GroupSpec::free(3)), DomainError);
  }

  TEST_CASE("embeddings") {
    Group Z(GroupSpec::integers()), Z2(GroupSpec::lattice(2)), F2(GroupSpec::free(2));
    Embedding e(Z, F2, {F2.parse("ab")}, 1);
    CHECK(e.map(Element{3}) == F2.parse("ababab"));
    CHECK(e.map(Element{-1}) == F2.parse("BA"));
    CHECK_THROWS_AS(Embedding(Z, Z2, {Element{0, 0}}, 1), EmbeddingError);
    CHECK_THROWS_AS(Embedding(Z2, F2, {F2.parse("a"), F2.parse("b")}, 1), EmbeddingError);
    Embedding diag(Z2, Z2, {Element{1, 1}, Element{1, -1}}, 1);
    CHECK(diag.map(Element{2, 1}) == Element{3, 1});
  }

  TEST_CASE("element hash is stable and separates small balls") {
    Group Z2(GroupSpec::lattice(2));
    std::set<std::uint64_t> hs;
    for (const auto& g : Z2.ball(10)) hs.insert(element_hash(g, 42));
    CHECK(hs.size() == Z2.ball(10).size());
    CHECK(element_hash(Element{1, 2}, 7) == element_hash(Element{1, 2}, 7));
    CHECK(element_hash(Element{1, 2}, 7) != element_hash(Element{1, 2}, 8));
  }
}
