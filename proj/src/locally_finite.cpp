#include <algorithm>
#include <bit>
#include <cmath>

#include "hypercyc/continuous.hpp"
#include "hypercyc/errors.hpp"
#include "hypercyc/random.hpp"

namespace hypercyc {

int LocallyFiniteChain::level(std::uint64_t mask) {
  return std::max(1, static_cast<int>(std::bit_width(mask)));
}

void LocallyFiniteChain::validate() const {
  params.validate();
  if (n_max < 1 || n_max > 20) throw CapacityError("chain depth must lie in [1, 20]");
}

Element mask_to_element(std::uint64_t mask) {
  Element g;
  for (int i = 0; mask; ++i, mask >>= 1)
    if (mask & 1) g.raw().push_back(i);
  return g;
}

std::uint64_t element_to_mask(const Element& g) {
  std::uint64_t m = 0;
  for (auto b : g) {
    if (b < 0 || b >= 64) throw DomainError("coordinate outside the chain");
    m |= std::uint64_t{1} << b;
  }
  return m;
}

std::vector<double> chain_rho_masses(const LocallyFiniteChain& c) {
  c.validate();
  // suffix[n] = sum_{m >= n} p_m / 2^m
  std::vector<double> suffix(c.n_max + 2, 0.0);
  for (int n = c.n_max; n >= 1; --n) suffix[n] = suffix[n + 1] + c.params.p(n) * std::ldexp(1.0, -n);
  std::vector<double> rho(c.order());
  for (std::uint64_t g = 0; g < rho.size(); ++g) rho[g] = suffix[LocallyFiniteChain::level(g)];
  return rho;
}

SparseMeasure locally_finite_rho(const Group& G, const LocallyFiniteChain& c) {
  if (G.spec().kind != GroupKind::LocallyFinite) throw DomainError("chain lives in sum Z/2");
  auto rho = chain_rho_masses(c);
  std::vector<Atom> atoms;
  for (std::uint64_t g = 0; g < rho.size(); ++g) atoms.push_back({mask_to_element(g), rho[g]});
  return SparseMeasure::from_atoms(std::move(atoms));
}

std::vector<double> xor_convolve(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || !std::has_single_bit(a.size())) throw DomainError("size mismatch");
  const std::size_t n = a.size();
  std::vector<double> out(n, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t g = 0; g < n; ++g) {
    double s = 0;
    for (std::size_t h = 0; h < n; ++h) s += a[h] * b[g ^ h];
    out[g] = s;
  }
  return out;
}

double stated_domination_constant(const LocallyFiniteChain& c, int m0) {
  return 1.0 / c.params.p(1) + std::ldexp(1.0, m0 - 1);
}

double corrected_domination_constant(const LocallyFiniteChain& c, int m0) {
  double below = 0, upto = 0;
  for (int n = 1; n < m0; ++n) below += c.params.p(n);
  upto = below + c.params.p(m0);
  return 1.0 / c.params.p(1) + std::ldexp(1.0, m0 - 1) * below / (upto * c.params.p(m0));
}

LocallyFiniteDomination domination_check_locally_finite(const LocallyFiniteChain& c,
                                                        const std::vector<double>& rho,
                                                        const std::vector<double>& rho2,
                                                        std::uint64_t g0) {
  if (g0 >= c.order()) throw DomainError("g0 outside K_n_max");
  LocallyFiniteDomination d;
  d.g0 = "{";
  for (int i = 0, first = 1; i < c.n_max; ++i)
    if (g0 >> i & 1) d.g0 += (first ? "" : ",") + std::to_string(i), first = 0;
  d.g0 += "}";
  d.m0 = LocallyFiniteChain::level(g0);
  d.C_stated = stated_domination_constant(c, d.m0);
  d.C_corrected = corrected_domination_constant(c, d.m0);
  const double slack = 1 + 1e-12;
  for (std::uint64_t g = 0; g < c.order(); ++g) {
    double lhs = rho[g ^ g0];  // (rho * delta_g0)(g) = rho(g g0^-1)
    d.best = std::max(d.best, lhs / rho2[g]);
    d.violations += lhs > d.C_stated * rho2[g] * slack;
    d.corrected_violations += lhs > d.C_corrected * rho2[g] * slack;
  }
  d.pass = d.violations == 0;
  return d;
}

LocallyFiniteReport locally_finite_report(const LocallyFiniteChain& c, std::size_t samples,
                                          std::uint64_t seed) {
  LocallyFiniteReport r;
  r.n_max = c.n_max;
  r.tail = c.params.tail();
  auto rho = chain_rho_masses(c);
  r.identity_mass = rho[0];
  auto rho2 = xor_convolve(rho, rho);

  const std::size_t n = c.order();
  auto lambda = [&](int i) {
    std::vector<double> v(n, 0.0);
    const std::size_t k = std::size_t{1} << i;
    for (std::size_t g = 0; g < k; ++g) v[g] = 1.0 / k;
    return v;
  };
  r.lambda_ok = true;
  for (int i = 1; i <= c.n_max; ++i)
    for (int j = 1; j <= c.n_max; ++j) {
      auto li = lambda(i), lj = lambda(j), lm = lambda(std::max(i, j));
      auto conv = xor_convolve(li, lj);
      ++r.lambda_pairs;
      for (std::size_t g = 0; g < n; ++g)
        r.lambda_max_error = std::max(r.lambda_max_error, std::abs(conv[g] - lm[g]));
    }
  r.lambda_ok = r.lambda_max_error < 1e-15;

  const double p1 = c.params.p(1);
  for (std::size_t g = 0; g < n; ++g) r.lower_bound_violations += rho2[g] < p1 * rho[g] * (1 - 1e-12);

  Rng rng(derive_seed(seed, 61, 0));
  for (std::size_t s = 0; s < samples; ++s) {
    auto g0 = static_cast<std::uint64_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    r.rows.push_back(domination_check_locally_finite(c, rho, rho2, g0));
    r.violations += r.rows.back().violations;
    r.corrected_violations += r.rows.back().corrected_violations;
  }
  r.pass = r.lambda_ok && r.lower_bound_violations == 0 && r.violations == 0;
  return r;
}

}  // namespace hypercyc
