#include "hypercyc/group.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

#include "hypercyc/errors.hpp"
#include "hypercyc/random.hpp"

namespace hypercyc {

std::strong_ordering operator<=>(const Element& a, const Element& b) {
  if (a.size() != b.size()) return a.size() <=> b.size();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] <=> b[i];
  return std::strong_ordering::equal;
}

std::uint64_t element_hash(const Element& e, std::uint64_t seed) noexcept {
  std::uint64_t h = mix64(seed ^ (0x51ed27ULL + e.size()));
  for (auto c : e) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return h;
}

std::size_t ElementHash::operator()(const Element& e) const noexcept {
  return static_cast<std::size_t>(element_hash(e));
}

std::string GroupSpec::name() const {
  switch (kind) {
    case GroupKind::Integers: return "Z";
    case GroupKind::Lattice: return "Z^" + std::to_string(d);
    case GroupKind::Free: return "F" + std::to_string(d);
    case GroupKind::Heisenberg: return "Heisenberg";
    case GroupKind::LocallyFinite: return "sum Z/2";
  }
  return "?";
}

Group::Group(GroupSpec spec, std::size_t ball_cap) : spec_(spec), cap_(ball_cap) {
  switch (spec_.kind) {
    case GroupKind::Integers:
      spec_.d = 1;
      break;
    case GroupKind::Lattice:
      if (spec_.d < 1 || spec_.d > 3) throw DomainError("lattice rank must be 1..3");
      break;
    case GroupKind::Free:
      if (spec_.d < 1 || spec_.d > 2) throw DomainError("free group rank must be 1..2");
      break;
    case GroupKind::Heisenberg:
      spec_.d = 2;
      break;
    case GroupKind::LocallyFinite:
      spec_.d = 0;
      break;
  }
  for (int i = 0; i < spec_.d; ++i) {
    gens_.push_back(generator(i, false));
    gens_.push_back(generator(i, true));
  }
}

Element Group::identity() const {
  Element e;
  switch (spec_.kind) {
    case GroupKind::Integers: e.raw().assign(1, 0); break;
    case GroupKind::Lattice: e.raw().assign(spec_.d, 0); break;
    case GroupKind::Heisenberg: e.raw().assign(3, 0); break;
    case GroupKind::Free:
    case GroupKind::LocallyFinite: break;
  }
  return e;
}

Element Group::generator(int i, bool inverted) const {
  if (i < 0 || i >= spec_.d) throw DomainError("generator index out of range");
  std::int64_t s = inverted ? -1 : 1;
  Element g = identity();
  switch (spec_.kind) {
    case GroupKind::Integers:
    case GroupKind::Lattice:
      g.raw()[i] = s;
      break;
    case GroupKind::Heisenberg:
      g.raw()[i] = s;
      break;
    case GroupKind::Free:
      g.raw().push_back(s * (i + 1));
      break;
    case GroupKind::LocallyFinite:
      break;
  }
  return g;
}

bool Group::is_canonical(const Element& a) const {
  switch (spec_.kind) {
    case GroupKind::Integers: return a.size() == 1;
    case GroupKind::Lattice: return a.size() == static_cast<std::size_t>(spec_.d);
    case GroupKind::Heisenberg: return a.size() == 3;
    case GroupKind::Free:
      for (std::size_t i = 0; i < a.size(); ++i) {
        std::int64_t l = a[i];
        if (l == 0 || std::llabs(l) > spec_.d) return false;
        if (i > 0 && a[i - 1] == -l) return false;
      }
      return true;
    case GroupKind::LocallyFinite:
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0) return false;
        if (i > 0 && a[i - 1] >= a[i]) return false;
      }
      return true;
  }
  return false;
}

void Group::validate(const Element& a) const {
  if (!is_canonical(a)) throw EncodingError("malformed encoding for " + spec_.name());
}

Element Group::canonicalize(const Element& raw) const {
  switch (spec_.kind) {
    case GroupKind::Integers:
    case GroupKind::Lattice:
    case GroupKind::Heisenberg:
      validate(raw);
      return raw;
    case GroupKind::Free: {
      Element out;
      for (auto l : raw) {
        if (l == 0 || std::llabs(l) > spec_.d) throw EncodingError("bad free-group letter");
        if (!out.empty() && out.raw().back() == -l)
          out.raw().pop_back();
        else
          out.raw().push_back(l);
      }
      return out;
    }
    case GroupKind::LocallyFinite: {
      std::vector<std::int64_t> v(raw.begin(), raw.end());
      for (auto b : v)
        if (b < 0) throw EncodingError("negative bit index");
      std::sort(v.begin(), v.end());
      Element out;
      for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        if ((j - i) % 2 == 1) out.raw().push_back(v[i]);
        i = j;
      }
      return out;
    }
  }
  return raw;
}

Element Group::mul_unchecked(const Element& a, const Element& b) const {
  switch (spec_.kind) {
    case GroupKind::Integers:
    case GroupKind::Lattice: {
      Element r = a;
      for (std::size_t i = 0; i < r.size(); ++i) r.raw()[i] += b[i];
      return r;
    }
    case GroupKind::Heisenberg:
      return Element{a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]};
    case GroupKind::Free: {
      std::size_t k = 0;
      while (k < a.size() && k < b.size() && a[a.size() - 1 - k] == -b[k]) ++k;
      Element r;
      r.raw().reserve(a.size() + b.size() - 2 * k);
      r.raw().insert(r.raw().end(), a.begin(), a.end() - k);
      r.raw().insert(r.raw().end(), b.begin() + k, b.end());
      return r;
    }
    case GroupKind::LocallyFinite: {
      Element r;
      std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                    std::back_inserter(r.raw()));
      return r;
    }
  }
  return a;
}

Element Group::inv_unchecked(const Element& a) const {
  switch (spec_.kind) {
    case GroupKind::Integers:
    case GroupKind::Lattice: {
      Element r = a;
      for (auto& c : r.raw()) c = -c;
      return r;
    }
    case GroupKind::Heisenberg:
      return Element{-a[0], -a[1], -a[2] + a[0] * a[1]};
    case GroupKind::Free: {
      Element r;
      for (std::size_t i = a.size(); i-- > 0;) r.raw().push_back(-a[i]);
      return r;
    }
    case GroupKind::LocallyFinite:
      return a;
  }
  return a;
}

Element Group::multiply(const Element& a, const Element& b) const {
  validate(a);
  validate(b);
  return mul_unchecked(a, b);
}

Element Group::inverse(const Element& a) const {
  validate(a);
  return inv_unchecked(a);
}

Element Group::power(const Element& a, std::int64_t n) const {
  validate(a);
  Element base = n < 0 ? inv_unchecked(a) : a;
  std::uint64_t k = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
  Element r = identity();
  while (k) {
    if (k & 1) r = mul_unchecked(r, base);
    base = mul_unchecked(base, base);
    k >>= 1;
  }
  return r;
}

std::vector<Element> Group::ball(int N) const {
  if (!spec_.finitely_generated()) throw DomainError("ball needs a finitely generated group");
  if (N < 0) throw DomainError("ball radius must be non-negative");
  std::unordered_set<Element, ElementHash> seen;
  std::vector<Element> frontier{identity()};
  seen.insert(identity());
  for (int r = 0; r < N && !frontier.empty(); ++r) {
    std::vector<Element> next;
    for (const auto& g : frontier)
      for (const auto& a : gens_) {
        Element h = mul_unchecked(g, a);
        if (seen.insert(h).second) {
          if (seen.size() > cap_)
            throw CapacityError("ball of radius " + std::to_string(N) + " in " + spec_.name() +
                                " exceeds cap " + std::to_string(cap_));
          next.push_back(std::move(h));
        }
      }
    frontier = std::move(next);
  }
  std::vector<Element> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

int Group::word_length(const Element& a) const {
  validate(a);
  switch (spec_.kind) {
    case GroupKind::Integers:
    case GroupKind::Lattice: {
      std::int64_t s = 0;
      for (auto c : a) s += std::llabs(c);
      return static_cast<int>(s);
    }
    case GroupKind::Free:
      return static_cast<int>(a.size());
    case GroupKind::LocallyFinite:
      throw DomainError("word length undefined for a locally finite group");
    case GroupKind::Heisenberg: {
      if (a == identity()) return 0;
      std::unordered_set<Element, ElementHash> seen{identity()};
      std::vector<Element> frontier{identity()};
      for (int r = 1; !frontier.empty(); ++r) {
        std::vector<Element> next;
        for (const auto& g : frontier)
          for (const auto& s : gens_) {
            Element h = mul_unchecked(g, s);
            if (h == a) return r;
            if (seen.insert(h).second) {
              if (seen.size() > cap_) throw CapacityError("Heisenberg word length exceeds ball cap");
              next.push_back(std::move(h));
            }
          }
        frontier = std::move(next);
      }
      break;
    }
  }
  throw DomainError("word length search failed");
}

namespace {

std::string join_tuple(const Element& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(a[i]);
  }
  return s + ")";
}

std::vector<std::int64_t> parse_ints(std::string_view body) {
  std::vector<std::int64_t> out;
  while (!body.empty()) {
    auto comma = body.find(',');
    auto tok = body.substr(0, comma);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || tok.empty())
      throw EncodingError("cannot parse integer '" + std::string(tok) + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

std::string Group::format(const Element& a) const {
  validate(a);
  switch (spec_.kind) {
    case GroupKind::Integers: return std::to_string(a[0]);
    case GroupKind::Lattice:
    case GroupKind::Heisenberg: return join_tuple(a);
    case GroupKind::Free: {
      if (a.empty()) return "e";
      std::string s;
      for (auto l : a) s += static_cast<char>((l > 0 ? 'a' : 'A') + std::llabs(l) - 1);
      return s;
    }
    case GroupKind::LocallyFinite: {
      std::string s = "{";
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(a[i]);
      }
      return s + "}";
    }
  }
  return "";
}

Element Group::parse(std::string_view s) const {
  Element out;
  switch (spec_.kind) {
    case GroupKind::Integers: {
      auto v = parse_ints(s);
      if (v.size() != 1) throw EncodingError("expected one integer");
      out.raw().assign(1, v[0]);
      break;
    }
    case GroupKind::Lattice:
    case GroupKind::Heisenberg: {
      if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw EncodingError("expected (..)");
      auto v = parse_ints(s.substr(1, s.size() - 2));
      out = Element(v.begin(), v.end());
      break;
    }
    case GroupKind::Free: {
      if (s == "e") return out;
      Element raw;
      for (char c : s) {
        if (c >= 'a' && c <= 'z') raw.raw().push_back(c - 'a' + 1);
        else if (c >= 'A' && c <= 'Z') raw.raw().push_back(-(c - 'A' + 1));
        else throw EncodingError(std::string("bad letter '") + c + "'");
      }
      out = canonicalize(raw);
      break;
    }
    case GroupKind::LocallyFinite: {
      if (s.size() < 2 || s.front() != '{' || s.back() != '}') throw EncodingError("expected {..}");
      auto body = s.substr(1, s.size() - 2);
      if (!body.empty()) {
        auto v = parse_ints(body);
        out = Element(v.begin(), v.end());
      }
      break;
    }
  }
  validate(out);
  return out;
}

Embedding::Embedding(const Group& sub, const Group& amb, std::vector<Element> images,
                     std::uint64_t seed, int random_checks, int injectivity_box)
    : sub_(sub), amb_(amb), images_(std::move(images)) {
  auto k = sub.spec().kind;
  if (k != GroupKind::Integers && k != GroupKind::Lattice)
    throw EmbeddingError("only Z^k subgroups are supported");
  if (images_.size() != static_cast<std::size_t>(sub.rank()))
    throw EmbeddingError("need one image per basis element");
  for (const auto& g : images_) amb.validate(g);

  Rng rng(seed);
  auto random_sub = [&] {
    Element g = sub.identity();
    for (auto& c : g.raw()) c = rng.uniform_int(-6, 6);
    return g;
  };
  for (int t = 0; t < random_checks; ++t) {
    Element x = random_sub(), y = random_sub();
    if (map(sub.multiply(x, y)) != amb.multiply(map(x), map(y)))
      throw EmbeddingError("images do not define a homomorphism (failed on " + sub.format(x) +
                           ", " + sub.format(y) + ")");
  }

  // injectivity on a box around the origin
  std::unordered_map<Element, Element, ElementHash> seen;
  Element g = sub.identity();
  const int d = sub.rank();
  for (auto& c : g.raw()) c = -injectivity_box;
  while (true) {
    auto [it, fresh] = seen.emplace(map(g), g);
    if (!fresh)
      throw EmbeddingError("images are not injective: " + sub.format(g) + " and " +
                           sub.format(it->second) + " collide");
    int i = 0;
    while (i < d && g[i] == injectivity_box) {
      g.raw()[i] = -injectivity_box;
      ++i;
    }
    if (i == d) break;
    g.raw()[i] += 1;
  }
}

Element Embedding::map(const Element& g) const {
  sub_.validate(g);
  Element r = amb_.identity();
  for (std::size_t i = 0; i < images_.size(); ++i)
    r = amb_.mul_unchecked(r, amb_.power(images_[i], g[i]));
  return r;
}

}  // namespace hypercyc
