#include "hypercyc/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "hypercyc/errors.hpp"
#include "hypercyc/random.hpp"

namespace hypercyc {

std::optional<Cylinder> Cylinder::make(std::vector<Cond> conds) {
  std::sort(conds.begin(), conds.end(),
            [](const Cond& a, const Cond& b) { return a.first < b.first; });
  Cylinder c;
  for (auto& cd : conds) {
    if (cd.second != 0 && cd.second != 1) throw DomainError("cylinder bits must be 0 or 1");
    if (!c.conds_.empty() && c.conds_.back().first == cd.first) {
      if (c.conds_.back().second != cd.second) return std::nullopt;
      continue;
    }
    c.conds_.push_back(std::move(cd));
  }
  return c;
}

double Cylinder::measure() const { return std::ldexp(1.0, -static_cast<int>(conds_.size())); }

Cylinder Cylinder::translated(const Group& G, const Element& g) const {
  // x in T_g C  iff  T_{g^-1} x in C  iff  x_{p g^-1} = b for every (p, b)
  Element ginv = G.inv_unchecked(g);
  std::vector<Cond> out;
  out.reserve(conds_.size());
  for (const auto& [p, b] : conds_) out.push_back({G.mul_unchecked(p, ginv), b});
  return *make(std::move(out));
}

std::optional<Cylinder> Cylinder::intersect(const Cylinder& o) const {
  std::vector<Cond> all = conds_;
  all.insert(all.end(), o.conds_.begin(), o.conds_.end());
  return make(std::move(all));
}

std::string Cylinder::format(const Group& G) const {
  std::string s = "{";
  for (std::size_t i = 0; i < conds_.size(); ++i) {
    if (i) s += ", ";
    s += "x[" + G.format(conds_[i].first) + "]=" + std::to_string(conds_[i].second);
  }
  return s + "}";
}

DynamicalSystem DynamicalSystem::bernoulli(const Group& G, std::uint64_t seed) {
  return DynamicalSystem(SystemKind::Bernoulli, G, {}, seed);
}

DynamicalSystem DynamicalSystem::rotation(const Group& G, std::vector<double> alpha,
                                          std::uint64_t seed) {
  auto k = G.spec().kind;
  if (k != GroupKind::Integers && k != GroupKind::Lattice)
    throw DomainError("rotation systems need Z or Z^d");
  if (alpha.size() != static_cast<std::size_t>(G.rank()))
    throw DomainError("rotation needs one frequency per generator");
  return DynamicalSystem(SystemKind::Rotation, G, std::move(alpha), seed);
}

PointHandle DynamicalSystem::sample(std::uint64_t draw) const {
  return PointHandle{draw, G_.identity(), nullptr};
}

PointHandle DynamicalSystem::sample_in(std::uint64_t draw, const Cylinder& c) const {
  if (kind_ != SystemKind::Bernoulli) throw DomainError("conditioned sampling is Bernoulli only");
  return PointHandle{draw, G_.identity(),
                     std::make_shared<const std::vector<Cylinder::Cond>>(c.conds())};
}

PointHandle DynamicalSystem::act(const Element& g, const PointHandle& x) const {
  return PointHandle{x.draw, G_.mul_unchecked(g, x.offset), x.forced};
}

int DynamicalSystem::bit(const PointHandle& x, const Element& position) const {
  Element pos = G_.mul_unchecked(position, x.offset);
  if (x.forced) {
    const auto& f = *x.forced;
    auto it = std::lower_bound(f.begin(), f.end(), pos,
                               [](const Cylinder::Cond& c, const Element& p) { return c.first < p; });
    if (it != f.end() && it->first == pos) return it->second;
  }
  return static_cast<int>(element_hash(pos, mix64(seed_, x.draw)) >> 63);
}

double DynamicalSystem::angle(const PointHandle& x, int i) const {
  if (kind_ != SystemKind::Rotation) throw DomainError("angle read on a non-rotation system");
  double u = to_unit(mix64(mix64(seed_, x.draw), 0xa11ce + static_cast<std::uint64_t>(i)));
  long double t = static_cast<long double>(u) +
                  static_cast<long double>(x.offset[i]) * static_cast<long double>(alpha_[i]);
  t -= std::floor(t);
  return static_cast<double>(t);
}

bool DynamicalSystem::in(const Cylinder& c, const PointHandle& x) const {
  if (kind_ != SystemKind::Bernoulli) throw DomainError("cylinders live on Bernoulli systems");
  for (const auto& [p, b] : c.conds())
    if (bit(x, p) != b) return false;
  return true;
}

SetFamily::SetFamily(const Group& G) : G_(G) {
  if (!G.spec().finitely_generated()) throw DomainError("set family needs a ball structure");
  for (int k = 0;; ++k) {
    auto ball = G.ball(k);
    if (ball.size() > 40) break;  // 3^|B_k| must fit in 64 bits
    std::uint64_t c = 1;
    for (std::size_t i = 0; i < ball.size(); ++i) c *= 3;
    c -= 1;
    if (total_ > ~std::uint64_t{0} - c) break;
    level_balls_.push_back(std::move(ball));
    level_counts_.push_back(c);
    total_ += c;
    if (k > 64) break;
  }
}

Cylinder SetFamily::descriptor(std::uint64_t d) const {
  if (d >= total_) throw DomainError("set descriptor index beyond enumerable range");
  std::size_t level = 0;
  while (d >= level_counts_[level]) d -= level_counts_[level++];
  std::uint64_t code = d + 1;  // skip the all-free code
  std::vector<Cylinder::Cond> conds;
  for (const auto& g : level_balls_[level]) {
    auto digit = code % 3;
    code /= 3;
    if (digit == 1) conds.push_back({g, 1});
    if (digit == 2) conds.push_back({g, 0});
  }
  return *Cylinder::make(std::move(conds));
}

std::uint64_t SetFamily::schedule(std::uint64_t n) {
  if (n == 0) throw DomainError("set schedule starts at index 1");
  return static_cast<std::uint64_t>(std::countr_zero(n));
}

bool SetFamily::eval(std::uint64_t n, const DynamicalSystem& sys, const PointHandle& x) const {
  return sys.in(set(n), x);
}

std::optional<std::size_t> TowerSpec::locate(const DynamicalSystem& sys, const PointHandle& x) const {
  for (std::size_t i = 0; i < translates.size(); ++i)
    if (sys.in(translates[i], x)) return i;
  return std::nullopt;
}

namespace {

Cylinder marker_cylinder(const Group& G, int m, std::string& kind) {
  std::vector<Cylinder::Cond> conds;
  const int d = G.rank();
  if (d == 1) {
    kind = "run";
    for (int k = 0; k < m; ++k) conds.push_back({Element{k}, 1});
    conds.push_back({Element{m}, 0});
  } else {
    kind = "box";
    Element p = G.identity();
    for (auto& c : p.raw()) c = -m;
    while (true) {
      bool centre = std::all_of(p.begin(), p.end(), [](std::int64_t c) { return c == 0; });
      conds.push_back({p, centre ? 0 : 1});
      int i = 0;
      while (i < d && p[i] == m) p.raw()[i++] = -m;
      if (i == d) break;
      p.raw()[i] += 1;
    }
  }
  return *Cylinder::make(std::move(conds));
}

std::size_t marker_bits(int d, int m) {
  if (d == 1) return static_cast<std::size_t>(m) + 1;
  std::size_t s = 1;
  for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(2 * m + 1);
  return s;
}

}  // namespace

TowerSpec rokhlin_tower(const DynamicalSystem& sys, int N, double eta, const TowerOptions& opt) {
  const Group& G = sys.group();
  auto kind = G.spec().kind;
  if (sys.kind() != SystemKind::Bernoulli || (kind != GroupKind::Integers && kind != GroupKind::Lattice))
    throw DomainError("towers are built for Bernoulli shifts over Z or Z^d");
  if (!(eta > 0 && eta < 1)) throw DomainError("eta must lie in (0,1)");
  if (N < 0) throw DomainError("tower height must be non-negative");

  TowerSpec t;
  t.N = N;
  t.eta = eta;
  t.ball = G.ball(N);
  const double n_ball = static_cast<double>(t.ball.size());
  const int d = G.rank();
  const int min_marker = 2 * N;
  auto fits = [&](std::size_t bits) {
    double tm = n_ball * std::ldexp(1.0, -static_cast<int>(bits));
    return tm <= opt.margin * eta / 2 && (!opt.accept || opt.accept(tm));
  };
  auto within_bits = [&](const Cylinder& base) -> std::optional<std::size_t> {
    if (!opt.within) return base.bits();
    auto c = base.intersect(*opt.within);
    if (!c) return std::nullopt;
    return c->bits();
  };
  auto suggest = [&] {
    for (int m = std::max(min_marker, 1);; ++m) {
      if (marker_bits(d, m) > static_cast<std::size_t>(opt.max_marker_bits)) return -1;
      std::string k;
      auto b = within_bits(marker_cylinder(G, m, k));
      if (b && fits(*b)) return m;
    }
  };

  int m = opt.marker.value_or(std::max(min_marker, 1));
  if (opt.marker && *opt.marker < min_marker)
    throw TowerError("marker size " + std::to_string(*opt.marker) +
                         " too short for disjoint translates over B_" + std::to_string(N),
                     suggest());
  while (true) {
    if (marker_bits(d, m) > static_cast<std::size_t>(opt.max_marker_bits))
      throw TowerError("no marker within " + std::to_string(opt.max_marker_bits) +
                           " bits is rare enough",
                       -1);
    Cylinder base = marker_cylinder(G, m, t.kind);
    if (opt.within) {
      auto c = base.intersect(*opt.within);
      if (!c) throw TowerError("marker contradicts the prescribed cylinder", -1);
      base = *c;
    }
    if (fits(base.bits())) {
      t.base = std::move(base);
      break;
    }
    if (opt.marker)
      throw TowerError("marker size " + std::to_string(m) + " is not rare enough for eta", suggest());
    ++m;
  }
  t.marker = m;
  t.base_measure = t.base.measure();
  t.tower_measure = n_ball * t.base_measure;
  for (const auto& g : t.ball) t.translates.push_back(t.base.translated(G, g));

  t.exact_disjoint = true;
  for (const auto& k : G.ball(2 * N)) {
    if (k == G.identity()) continue;
    if (t.base.intersect(t.base.translated(G, k))) {
      t.exact_disjoint = false;
      break;
    }
  }
  if (!t.exact_disjoint) throw TowerError("translates of the marker overlap", suggest());

  if (opt.samples || opt.conditional_samples)
    confirm_tower(sys, t, opt.samples, opt.conditional_samples, opt.seed, opt.confidence);
  else
    t.pass = t.exact_disjoint && t.tower_measure < eta / 2;
  return t;
}

void confirm_tower(const DynamicalSystem& sys, TowerSpec& t, std::size_t samples,
                   std::size_t conditional_samples, std::uint64_t seed, double confidence) {
  const Group& G = sys.group();
  std::vector<unsigned char> counts(samples);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < samples; ++i) {
    auto x = sys.sample(derive_seed(seed, 11, i));
    unsigned char c = 0;
    for (const auto& tr : t.translates)
      if (sys.in(tr, x) && c < 255) ++c;
    counts[i] = c;
  }
  std::vector<Cylinder> others;
  for (const auto& k : G.ball(2 * t.N))
    if (k != G.identity()) others.push_back(t.base.translated(G, k));
  std::vector<unsigned char> cond(conditional_samples);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < conditional_samples; ++i) {
    auto x = sys.sample_in(derive_seed(seed, 12, i), t.base);
    unsigned char c = 0;
    for (const auto& o : others)
      if (sys.in(o, x)) c = 1;
    cond[i] = c;
  }
  t.samples = samples;
  t.hits = t.collisions = 0;
  for (auto c : counts) {
    t.hits += c >= 1;
    t.collisions += c >= 2;
  }
  t.conditional_samples = conditional_samples;
  t.conditional_collisions = 0;
  for (auto c : cond) t.conditional_collisions += c;
  t.measure_ci = clopper_pearson(t.hits, samples, confidence);
  t.pass = t.exact_disjoint && t.collisions == 0 && t.conditional_collisions == 0 &&
           (samples == 0 ? t.tower_measure < t.eta / 2 : t.measure_ci.hi < t.eta / 2);
}

}  // namespace hypercyc
