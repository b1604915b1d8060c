#include "hypercyc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include <omp.h>

#include "hypercyc/errors.hpp"

namespace hypercyc {

namespace {

bool by_element(const Atom& a, const Atom& b) { return a.element < b.element; }

const Atom* find_atom(const std::vector<Atom>& atoms, const Element& g) {
  auto it = std::lower_bound(atoms.begin(), atoms.end(), g,
                             [](const Atom& a, const Element& x) { return a.element < x; });
  if (it == atoms.end() || it->element != g) return nullptr;
  return &*it;
}

// sums runs of equal elements left to right; input must be stably sorted
std::vector<Atom> merge_sorted_runs(std::vector<Atom>&& v) {
  std::vector<Atom> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i + 1;
    double m = v[i].mass;
    while (j < v.size() && v[j].element == v[i].element) m += v[j++].mass;
    if (m > 0) out.push_back({std::move(v[i].element), m});
    i = j;
  }
  return out;
}

}  // namespace

SparseMeasure SparseMeasure::from_atoms(std::vector<Atom> atoms) {
  std::stable_sort(atoms.begin(), atoms.end(), by_element);
  return from_sorted(merge_sorted_runs(std::move(atoms)));
}

SparseMeasure SparseMeasure::from_sorted(std::vector<Atom> atoms) {
  SparseMeasure m;
  m.atoms_ = std::move(atoms);
  for (const auto& a : m.atoms_) m.total_ += a.mass;
  return m;
}

SparseMeasure SparseMeasure::dirac(const Element& g, double mass) {
  return from_atoms({{g, mass}});
}

double SparseMeasure::mass(const Element& g) const {
  auto* a = find_atom(atoms_, g);
  return a ? a->mass : 0.0;
}

bool SparseMeasure::contains(const Element& g) const { return find_atom(atoms_, g) != nullptr; }

bool SparseMeasure::is_symmetric(const Group& G) const {
  for (const auto& a : atoms_)
    if (mass(G.inv_unchecked(a.element)) != a.mass) return false;
  return true;
}

int SparseMeasure::support_radius(const Group& G) const {
  int r = 0;
  for (const auto& a : atoms_) r = std::max(r, G.word_length(a.element));
  return r;
}

SparseMeasure SparseMeasure::scaled(double c) const {
  std::vector<Atom> v = atoms_;
  for (auto& a : v) a.mass *= c;
  return from_sorted(std::move(v));
}

SparseMeasure step_distribution(const Group& G) {
  if (!G.spec().finitely_generated()) throw DomainError("step distribution needs generators");
  const double m = 1.0 / (2 * G.rank() + 1);
  std::vector<Atom> atoms{{G.identity(), m}};
  for (const auto& a : G.generators()) atoms.push_back({a, m});
  return SparseMeasure::from_atoms(std::move(atoms));
}

SparseMeasure convolve(const Group& G, const SparseMeasure& mu, const SparseMeasure& nu,
                       std::size_t cap) {
  const auto& L = mu.atoms();
  const auto& R = nu.atoms();
  if (L.empty() || R.empty()) return {};
  const std::size_t nl = L.size(), nr = R.size();

  // each thread numbers the products it sees; slot holds that local number
  using Ids = std::unordered_map<Element, std::uint32_t, ElementHash>;
  const std::size_t nt = static_cast<std::size_t>(omp_get_max_threads());
  std::vector<Ids> ids(nt);
  std::vector<std::vector<const Element*>> local_keys(nt);
  std::vector<std::uint32_t> slot(nl * nr);
  std::vector<std::uint32_t> owner(nl);
#pragma omp parallel num_threads(static_cast<int>(nt))
  {
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    auto& keys = local_keys[t];
    auto& mine = ids[t];
    mine.reserve(nl * nr / nt + 16);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < nl; ++i) {
      owner[i] = static_cast<std::uint32_t>(t);
      for (std::size_t j = 0; j < nr; ++j) {
        auto [it, fresh] =
            mine.try_emplace(G.mul_unchecked(L[i].element, R[j].element), static_cast<std::uint32_t>(keys.size()));
        if (fresh) keys.push_back(&it->first);
        slot[i * nr + j] = it->second;
      }
    }
  }

  // global order: sort (key, thread, local id) and number the distinct keys
  struct Ref {
    const Element* g;
    std::uint32_t t, id;
  };
  std::vector<Ref> refs;
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t k = 0; k < local_keys[t].size(); ++k)
      refs.push_back({local_keys[t][k], static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(k)});
  std::sort(refs.begin(), refs.end(), [](const Ref& a, const Ref& b) { return *a.g < *b.g; });
  std::vector<std::vector<std::uint32_t>> to_global(nt);
  for (std::size_t t = 0; t < nt; ++t) to_global[t].resize(local_keys[t].size());
  std::vector<const Element*> keys;
  for (const auto& r : refs) {
    if (keys.empty() || *keys.back() != *r.g) keys.push_back(r.g);
    to_global[r.t][r.id] = static_cast<std::uint32_t>(keys.size() - 1);
  }
  if (keys.size() > cap)
    throw CapacityError("convolution support " + std::to_string(keys.size()) + " exceeds cap " +
                        std::to_string(cap));

  // summed in (left, right) order like the serial reference, so the two agree bit for bit
  std::vector<double> acc(keys.size(), 0.0);
  for (std::size_t i = 0; i < nl; ++i) {
    const auto& tg = to_global[owner[i]];
    for (std::size_t j = 0; j < nr; ++j) acc[tg[slot[i * nr + j]]] += L[i].mass * R[j].mass;
  }

  std::vector<Atom> atoms;
  atoms.reserve(keys.size());
  for (std::size_t k = 0; k < keys.size(); ++k)
    if (acc[k] > 0) atoms.push_back({*keys[k], acc[k]});
  return SparseMeasure::from_sorted(std::move(atoms));
}

SparseMeasure convolution_power(const Group& G, const SparseMeasure& rho, int n, std::size_t cap) {
  if (n < 1) throw DomainError("convolution power needs n >= 1");
  SparseMeasure cur = rho;
  for (int k = 2; k <= n; ++k) cur = convolve(G, cur, rho, cap);
  return cur;
}

std::vector<SparseMeasure> convolution_powers(const Group& G, const SparseMeasure& rho, int n_max,
                                              std::size_t cap) {
  std::vector<SparseMeasure> out;
  out.push_back(SparseMeasure::dirac(G.identity()));
  for (int n = 1; n <= n_max; ++n)
    out.push_back(n == 1 ? rho : convolve(G, out.back(), rho, cap));
  return out;
}

double WeightParams::p(int n) const { return (1.0 - q) * std::pow(q, n - 1); }
double WeightParams::tail() const { return std::pow(q, n_max); }

void WeightParams::validate() const {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0,1)");
  if (n_max < 1) throw DomainError("Nmax must be >= 1");
}

WeightParams WeightParams::defaults_for(const GroupSpec& spec) {
  switch (spec.kind) {
    case GroupKind::Free: return {0.5, spec.d == 1 ? 40 : 11};
    case GroupKind::Heisenberg: return {0.5, 12};
    case GroupKind::Lattice: return {0.5, spec.d >= 3 ? 20 : 40};
    default: return {0.5, 40};
  }
}

WeightTable::WeightTable(WeightParams params, std::vector<Atom> atoms, int support_radius)
    : params_(params), atoms_(std::move(atoms)), support_radius_(support_radius) {
  for (const auto& a : atoms_) stored_mass_ += a.mass;
}

double WeightTable::weight(const Element& g) const {
  auto* a = find_atom(atoms_, g);
  return a ? a->mass : 0.0;
}

bool WeightTable::stored(const Element& g) const { return find_atom(atoms_, g) != nullptr; }

std::string WeightTable::to_csv(const Group& G) const {
  std::string s = "element,weight\n";
  char buf[64];
  for (const auto& a : atoms_) {
    std::snprintf(buf, sizeof buf, "%.17g", a.mass);
    std::string el = G.format(a.element);
    if (el.find(',') != std::string::npos) el = "\"" + el + "\"";
    s += el + "," + buf + "\n";
  }
  return s;
}

WeightTable build_weight(const Group& G, const WeightParams& params, std::size_t cap) {
  return build_weight(G, step_distribution(G), params, cap);
}

WeightTable build_weight(const Group& G, const SparseMeasure& step, const WeightParams& params,
                         std::size_t cap) {
  params.validate();
  const int step_radius = step.support_radius(G);
  std::vector<Atom> acc;
  SparseMeasure cur;
  for (int n = 1; n <= params.n_max; ++n) {
    cur = n == 1 ? step : convolve(G, cur, step, cap);
    const double pn = params.p(n);
    // merge acc and pn*cur; per element the sum runs over n in increasing order
    std::vector<Atom> next;
    next.reserve(acc.size() + cur.size());
    auto a = acc.begin();
    auto b = cur.atoms().begin();
    while (a != acc.end() || b != cur.atoms().end()) {
      if (b == cur.atoms().end() || (a != acc.end() && a->element < b->element)) {
        next.push_back(std::move(*a++));
      } else if (a == acc.end() || b->element < a->element) {
        next.push_back({b->element, pn * b->mass});
        ++b;
      } else {
        next.push_back({std::move(a->element), a->mass + pn * b->mass});
        ++a;
        ++b;
      }
    }
    acc = std::move(next);
  }
  return WeightTable(params, std::move(acc), step_radius * params.n_max);
}

double ratio_bound(const Group& G, const WeightParams& params, const Element& b) {
  return std::pow((2 * G.rank() + 1) * params.C(), G.word_length(b));
}

namespace {

RatioCertificate ratio_scan(const Group& G, const Element& b, double bound, int radius,
                            const std::vector<Element>& domain,
                            const std::function<double(const Element&)>& f) {
  RatioCertificate c;
  c.element = G.format(b);
  c.length = G.spec().kind == GroupKind::LocallyFinite ? 0 : G.word_length(b);
  c.bound = bound;
  c.lower_bound = 1.0 / bound;
  c.domain_radius = radius;
  std::unordered_set<Element, ElementHash> inside(domain.begin(), domain.end());
  std::vector<double> ratios(domain.size(), -1.0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < domain.size(); ++i) {
    Element gb = G.mul_unchecked(domain[i], b);
    if (!inside.count(gb)) continue;
    double den = f(domain[i]);
    if (den <= 0) continue;
    ratios[i] = f(gb) / den;
  }
  c.observed_max = 0.0;
  c.observed_min = std::numeric_limits<double>::infinity();
  for (double r : ratios) {
    if (r < 0) continue;
    ++c.domain_size;
    c.observed_max = std::max(c.observed_max, r);
    c.observed_min = std::min(c.observed_min, r);
    if (r > bound * (1 + 1e-12) || r < c.lower_bound * (1 - 1e-12)) ++c.violations;
  }
  if (c.domain_size == 0) throw DomainError("empty evaluation domain for ratio of " + c.element);
  c.pass = c.violations == 0;
  return c;
}

}  // namespace

RatioCertificate weight_ratio(const Group& G, const WeightTable& w, const Element& b) {
  return weight_ratio(G, w, b, ratio_bound(G, w.params(), b));
}

RatioCertificate weight_ratio(const Group& G, const WeightTable& w, const Element& b, double bound) {
  G.validate(b);
  const int R = w.interior_radius();
  auto domain = G.ball(R);
  return ratio_scan(G, b, bound, R, domain, [&](const Element& g) { return w.weight(g); });
}

RatioCertificate measure_ratio(const Group& G, const SparseMeasure& rho, const Element& b,
                               double bound, int domain_radius) {
  G.validate(b);
  std::vector<Element> domain;
  for (const auto& a : rho.atoms())
    if (G.word_length(a.element) <= domain_radius) domain.push_back(a.element);
  return ratio_scan(G, b, bound, domain_radius, domain,
                    [&](const Element& g) { return rho.mass(g); });
}

SparseMeasure restrict_renormalize(const WeightTable& w_amb, const Embedding& emb, int radius) {
  const Group& H = emb.ambient();
  const int interior = w_amb.interior_radius();
  std::vector<Atom> atoms;
  for (const auto& g : emb.sub().ball(radius)) {
    Element h = emb.map(g);
    if (H.word_length(h) > interior) continue;
    double m = w_amb.weight(h);
    if (m > 0) atoms.push_back({g, m});
  }
  double K = 0;
  for (const auto& a : atoms) K += a.mass;
  if (!(K > 0)) throw DegenerateRestrictionError("restricted weight has zero mass");
  for (auto& a : atoms) a.mass /= K;
  return SparseMeasure::from_atoms(std::move(atoms));
}

}  // namespace hypercyc
