#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hypercyc/group.hpp"
#include "hypercyc/measure.hpp"

namespace hypercyc {

// ---- G = R: K = [-k, k], L = [-l, l], rho = Lebesgue on L normalised ----

struct IntervalMeasure {
  double ell = 2.0;
  double length() const { return 2 * ell; }
  double density(double t) const { return std::abs(t) <= ell ? 1.0 / length() : 0.0; }
};

// length(L cap (t - L)) in closed form
double overlap_density(const IntervalMeasure& L, double t);

// integral of f over [a, b] for a piecewise smooth f: coarse scan, jumps located by
// bisection, Gauss-Legendre on each smooth piece
double piecewise_integral(const std::function<double(double)>& f, double a, double b,
                          std::size_t scan = 64);
// the same overlap length by quadrature of 1_L(t - h) 1_L(h)
double overlap_quadrature(const IntervalMeasure& L, double t);

struct RealDominationReport {
  double k = 1.0;            // K = [-k, k]
  double ell = 2.0;
  double grid_step = 1e-3;
  // quadrature against closed form
  std::size_t quad_points = 0;
  double quad_max_error = 0.0;
  // u = min of psi over KL
  double u_grid = 0.0;
  double u_closed = 0.0;
  double D = 0.0;            // 2 / u
  double C = 2.0;
  double norm_bound = 0.0;   // sqrt(D C)
  // rho * delta_k <= D rho * rho on the window [-ell, ell]
  std::vector<double> shifts;
  std::size_t window_points = 0;
  std::size_t window_violations = 0;
  // the same on the whole support of rho * delta_k
  std::size_t support_points = 0;
  std::size_t support_violations = 0;
  double support_tight_D = 0.0;     // sup of the density ratio over the support
  double support_D_corrected = 0.0; // 2 lambda(L) / u
  std::size_t corrected_violations = 0;
  bool pass = false;
};

RealDominationReport domination_constant_real(double k, double ell, double grid_step,
                                              std::size_t quad_points, double C = 2.0);

// ---- G = sum Z/2 with K_n = span of the first n coordinates ----

struct LocallyFiniteChain {
  int n_max = 10;
  WeightParams params;  // p_n as for the random-walk weight

  std::uint64_t order() const { return std::uint64_t{1} << n_max; }
  // first n >= 1 with g in K_n
  static int level(std::uint64_t mask);
  void validate() const;
};

Element mask_to_element(std::uint64_t mask);
std::uint64_t element_to_mask(const Element& g);

// rho = sum_n p_n lambda_n, truncated at n_max, indexed by mask
std::vector<double> chain_rho_masses(const LocallyFiniteChain& c);
SparseMeasure locally_finite_rho(const Group& G, const LocallyFiniteChain& c);
// convolution on K_{n_max}; both inputs indexed by mask
std::vector<double> xor_convolve(const std::vector<double>& a, const std::vector<double>& b);

// 1/p_1 + [K_m0 : K_1]
double stated_domination_constant(const LocallyFiniteChain& c, int m0);
// 1/p_1 + 2^{m0-1} (sum_{n<m0} p_n) / ((sum_{i<=m0} p_i) p_m0), which the proof's chain supports
double corrected_domination_constant(const LocallyFiniteChain& c, int m0);

struct LocallyFiniteDomination {
  std::string g0;
  int m0 = 0;
  double C_stated = 0.0;
  double C_corrected = 0.0;
  double best = 0.0;                 // sup of (rho * delta_g0) / (rho * rho)
  std::size_t violations = 0;        // against C_stated
  std::size_t corrected_violations = 0;
  bool pass = false;
};

LocallyFiniteDomination domination_check_locally_finite(const LocallyFiniteChain& c,
                                                        const std::vector<double>& rho,
                                                        const std::vector<double>& rho2,
                                                        std::uint64_t g0);

struct LocallyFiniteReport {
  int n_max = 0;
  double tail = 0.0;                 // q^n_max missing from rho
  double identity_mass = 0.0;
  std::size_t lambda_pairs = 0;
  double lambda_max_error = 0.0;     // lambda_i * lambda_j against lambda_{max(i,j)}
  bool lambda_ok = false;
  std::size_t lower_bound_violations = 0;  // rho * rho >= p_1 rho
  std::vector<LocallyFiniteDomination> rows;
  std::size_t violations = 0;
  std::size_t corrected_violations = 0;
  bool pass = false;
};

LocallyFiniteReport locally_finite_report(const LocallyFiniteChain& c, std::size_t samples,
                                          std::uint64_t seed);

}  // namespace hypercyc
