#include "hypercyc/weighted_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hypercyc/errors.hpp"
#include "hypercyc/random.hpp"

namespace hypercyc {

WeightedVector WeightedVector::from_entries(std::vector<Entry> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.element < b.element; });
  WeightedVector v;
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i + 1;
    double c = entries[i].coef;
    while (j < entries.size() && entries[j].element == entries[i].element) c += entries[j++].coef;
    if (c != 0.0) v.entries_.push_back({std::move(entries[i].element), c});
    i = j;
  }
  return v;
}

WeightedVector WeightedVector::delta(const Element& g, double c) { return from_entries({{g, c}}); }

double WeightedVector::coef(const Element& g) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), g,
                             [](const Entry& e, const Element& x) { return e.element < x; });
  return it != entries_.end() && it->element == g ? it->coef : 0.0;
}

double WeightedVector::max_abs() const {
  double m = 0;
  for (const auto& e : entries_) m = std::max(m, std::abs(e.coef));
  return m;
}

WeightedVector WeightedVector::operator+(const WeightedVector& o) const {
  std::vector<Entry> all = entries_;
  all.insert(all.end(), o.entries_.begin(), o.entries_.end());
  return from_entries(std::move(all));
}

WeightedVector WeightedVector::operator-(const WeightedVector& o) const { return *this + o * -1.0; }

WeightedVector WeightedVector::operator*(double c) const {
  std::vector<Entry> all = entries_;
  for (auto& e : all) e.coef *= c;
  return from_entries(std::move(all));
}

bool operator==(const WeightedVector& a, const WeightedVector& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i)
    if (a.entries_[i].element != b.entries_[i].element || a.entries_[i].coef != b.entries_[i].coef)
      return false;
  return true;
}

std::string WeightedVector::to_csv(const Group& G) const {
  std::string s = "element,coefficient\n";
  char buf[64];
  for (const auto& e : entries_) {
    std::snprintf(buf, sizeof buf, "%.17g", e.coef);
    std::string el = G.format(e.element);
    if (el.find(',') != std::string::npos) el = "\"" + el + "\"";
    s += el + "," + buf + "\n";
  }
  return s;
}

NormEstimate norm_estimate(const WeightedVector& v, const WeightTable& w) {
  NormEstimate r;
  double s = 0, maxsq = 0;
  for (const auto& e : v.entries()) {
    double wg = w.weight(e.element);
    if (wg == 0.0) r.outside_support = true;
    s += e.coef * e.coef * wg;
    maxsq = std::max(maxsq, e.coef * e.coef);
  }
  r.value = std::sqrt(s);
  // the unstored part of w sums to at most tail_bound over all of G
  r.upper = std::sqrt(s + maxsq * w.tail_bound());
  return r;
}

double norm(const WeightedVector& v, const WeightTable& w) { return norm_estimate(v, w).value; }

double inner(const WeightedVector& a, const WeightedVector& b, const WeightTable& w) {
  double s = 0;
  auto i = a.entries().begin();
  auto j = b.entries().begin();
  while (i != a.entries().end() && j != b.entries().end()) {
    if (i->element < j->element) ++i;
    else if (j->element < i->element) ++j;
    else {
      s += i->coef * j->coef * w.weight(i->element);
      ++i;
      ++j;
    }
  }
  return s;
}

WeightedVector shift(const Group& G, const WeightedVector& v, const Element& g) {
  Element ginv = G.inverse(g);
  std::vector<Entry> out;
  out.reserve(v.support_size());
  for (const auto& e : v.entries()) out.push_back({G.mul_unchecked(e.element, ginv), e.coef});
  return WeightedVector::from_entries(std::move(out));
}

DistanceBound distance_bound(const WeightedVector& v, const WeightedVector& center,
                             const WeightTable& w, double extra_sq) {
  WeightedVector d = v - center;
  double s = 0, maxsq = 0;
  for (const auto& e : d.entries()) {
    s += e.coef * e.coef * w.weight(e.element);
    maxsq = std::max(maxsq, e.coef * e.coef);
  }
  return {std::sqrt(s), std::sqrt(s + maxsq * w.tail_bound() + extra_sq)};
}

NormCertificate operator_norm_certificate(const Group& G, const WeightTable& w, const Element& a,
                                          std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("trials must be >= 1");
  if (std::find(G.generators().begin(), G.generators().end(), a) == G.generators().end())
    throw DomainError("operator norm certificate expects a generator");
  NormCertificate c;
  c.generator = G.format(a);
  c.bound = std::sqrt((2 * G.rank() + 1) * w.params().C());
  c.trials = trials;
  c.seed = seed;
  c.domain_radius = w.interior_radius() - 1;
  if (c.domain_radius < 0) throw DomainError("weight table too shallow for an interior domain");
  const auto domain = G.ball(c.domain_radius);
  c.domain_size = domain.size();
  const double tol = 1e-9;

  std::vector<double> atom_ratio(domain.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < domain.size(); ++i) {
    auto v = WeightedVector::delta(domain[i]);
    atom_ratio[i] = norm(shift(G, v, a), w) / norm(v, w);
  }
  std::vector<double> rand_ratio(trials);
  const std::size_t max_support = std::min<std::size_t>(16, domain.size());
#pragma omp parallel for schedule(static)
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, 1, t));
    std::size_t k = 1 + static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(max_support) - 1));
    std::vector<Entry> es;
    for (std::size_t j = 0; j < k; ++j)
      es.push_back({domain[rng.uniform_int(0, static_cast<std::int64_t>(domain.size()) - 1)],
                    2.0 * rng.uniform() - 1.0});
    auto v = WeightedVector::from_entries(std::move(es));
    double n0 = norm(v, w);
    rand_ratio[t] = n0 > 0 ? norm(shift(G, v, a), w) / n0 : 0.0;
  }

  std::size_t best_atom = 0, best_trial = 0;
  for (std::size_t i = 0; i < atom_ratio.size(); ++i) {
    if (atom_ratio[i] > atom_ratio[best_atom]) best_atom = i;
    if (atom_ratio[i] > c.bound + tol) ++c.violations;
  }
  for (std::size_t t = 0; t < trials; ++t) {
    if (rand_ratio[t] > rand_ratio[best_trial]) best_trial = t;
    if (rand_ratio[t] > c.bound + tol) ++c.violations;
  }
  c.observed_atoms = atom_ratio[best_atom];
  c.observed_random = rand_ratio[best_trial];
  c.observed = std::max(c.observed_atoms, c.observed_random);
  c.witness = WeightedVector::delta(domain[best_atom]);
  c.pass = c.violations == 0;
  return c;
}

SubgroupNormCertificate subgroup_norm_certificate(const Group& G, const WeightTable& w_G,
                                                  const Element& g0, double bound) {
  SubgroupNormCertificate c;
  c.element = G.format(g0);
  c.bound = bound;
  // ||S_g0 xi||^2 = sum_h xi(h)^2 w(h g0^-1): the sup ratio is the squared norm
  auto r = weight_ratio(G, w_G, G.inverse(g0), bound);
  c.observed = r.observed_max;
  c.norm_observed = std::sqrt(r.observed_max);
  c.domain_radius = r.domain_radius;
  c.domain_size = r.domain_size;
  c.pass = c.observed <= bound * (1 + 1e-12);
  return c;
}

}  // namespace hypercyc
