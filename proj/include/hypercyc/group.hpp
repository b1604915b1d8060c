#pragma once

#include <boost/container/small_vector.hpp>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace hypercyc {

enum class GroupKind { Integers, Lattice, Free, Heisenberg, LocallyFinite };

struct GroupSpec {
  GroupKind kind = GroupKind::Integers;
  int d = 1;

  static GroupSpec integers() { return {GroupKind::Integers, 1}; }
  static GroupSpec lattice(int d) { return {GroupKind::Lattice, d}; }
  static GroupSpec free(int d) { return {GroupKind::Free, d}; }
  static GroupSpec heisenberg() { return {GroupKind::Heisenberg, 2}; }
  static GroupSpec locally_finite() { return {GroupKind::LocallyFinite, 0}; }

  bool finitely_generated() const { return kind != GroupKind::LocallyFinite; }
  std::string name() const;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

// Canonical encodings:
//   Integers      {n}
//   Lattice       {x_1..x_d}
//   Free          reduced word, letter +-(i+1) for a_i^{+-1}
//   Heisenberg    {x, y, z}
//   LocallyFinite strictly increasing bit indices (0-based)
class Element {
 public:
  using Storage = boost::container::small_vector<std::int64_t, 4>;

  Element() = default;
  Element(std::initializer_list<std::int64_t> c) : c_(c) {}
  template <class It>
  Element(It first, It last) : c_(first, last) {}

  std::size_t size() const { return c_.size(); }
  bool empty() const { return c_.empty(); }
  std::int64_t operator[](std::size_t i) const { return c_[i]; }
  const std::int64_t* begin() const { return c_.data(); }
  const std::int64_t* end() const { return c_.data() + c_.size(); }
  Storage& raw() { return c_; }
  const Storage& raw() const { return c_; }

  friend bool operator==(const Element& a, const Element& b) { return a.c_ == b.c_; }
  // shortlex: shorter encodings first, then lexicographic
  friend std::strong_ordering operator<=>(const Element& a, const Element& b);

 private:
  Storage c_;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept;
};

std::uint64_t element_hash(const Element& e, std::uint64_t seed = 0) noexcept;

inline constexpr std::size_t kDefaultBallCap = 1'000'000;

class Group {
 public:
  explicit Group(GroupSpec spec, std::size_t ball_cap = kDefaultBallCap);

  const GroupSpec& spec() const { return spec_; }
  std::size_t ball_cap() const { return cap_; }
  int rank() const { return spec_.d; }

  Element identity() const;
  Element multiply(const Element& a, const Element& b) const;
  Element inverse(const Element& a) const;
  Element power(const Element& a, std::int64_t n) const;

  // no validation; callers guarantee canonical inputs
  Element mul_unchecked(const Element& a, const Element& b) const;
  Element inv_unchecked(const Element& a) const;

  bool is_canonical(const Element& a) const;
  void validate(const Element& a) const;
  // reduce an arbitrary encoding to canonical form
  Element canonicalize(const Element& raw) const;

  // a_1, a_1^{-1}, a_2, a_2^{-1}, ...
  const std::vector<Element>& generators() const { return gens_; }
  Element generator(int i, bool inverted = false) const;

  std::vector<Element> ball(int N) const;
  int word_length(const Element& a) const;

  std::string format(const Element& a) const;
  Element parse(std::string_view s) const;

 private:
  GroupSpec spec_;
  std::size_t cap_;
  std::vector<Element> gens_;
};

// Injective homomorphism Z^k -> ambient given by commuting images of the basis.
class Embedding {
 public:
  Embedding(const Group& sub, const Group& amb, std::vector<Element> images,
            std::uint64_t seed, int random_checks = 256, int injectivity_box = 4);

  Element map(const Element& g) const;
  const Group& sub() const { return sub_; }
  const Group& ambient() const { return amb_; }
  const std::vector<Element>& images() const { return images_; }

 private:
  Group sub_;
  Group amb_;
  std::vector<Element> images_;
};

}  // namespace hypercyc
