#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypercyc/dynamics.hpp"
#include "hypercyc/measure.hpp"

namespace hypercyc {

enum class ObservableKind { Indicator, Cosine, Constant };

struct Observable {
  ObservableKind kind = ObservableKind::Constant;
  Cylinder cylinder;  // Indicator
  int coordinate = 0; // Cosine: cos(2 pi x_i)
  double value = 1.0; // Constant

  static Observable indicator(Cylinder c) { return {ObservableKind::Indicator, std::move(c), 0, 1.0}; }
  static Observable cosine(int i = 0) { return {ObservableKind::Cosine, {}, i, 1.0}; }
  static Observable constant(double c) { return {ObservableKind::Constant, {}, 0, c}; }

  double bound() const;
  double mean() const;  // integral against the invariant measure
  double eval(const DynamicalSystem& sys, const PointHandle& x) const;
  std::string describe(const Group& G) const;
};

// (A^n f)(x) = sum_g f(T_g x) rho^{*n}(g); pass delta_e for n = 0
double markov_average(const DynamicalSystem& sys, const Observable& f, const SparseMeasure& rho_n,
                      const PointHandle& x);

struct JrtRow {
  int n = 0;
  double sup_dev = 0.0;
  double l2_dev = 0.0;
  double mean_sq_dev = 0.0;
  double mean_sq_se = 0.0;
  double predicted_l2 = -1.0;  // closed form where one exists, else -1
  double ratio = 0.0;          // l2_dev[n] / l2_dev[n-1]
};

struct JrtReport {
  std::string observable;
  double mean = 0.0;
  double bound = 0.0;
  double aperiodicity_witness = 0.0;  // rho(e)
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::vector<JrtRow> rows;  // n = 0..n_max
  bool contraction = true;   // sup |A^n f| <= ||f||_inf on every sample
  bool positivity = true;    // f >= 0 implies A^n f >= 0
  bool converged = false;    // final l2 deviation below tolerance
  bool trend = false;        // monotone envelope within sampling error
  bool pass = false;
};

// powers[n] = rho^{*n}, powers[0] = delta_e
JrtReport jrt_convergence_report(const DynamicalSystem& sys, const Observable& f,
                                 const std::vector<SparseMeasure>& powers, std::size_t samples,
                                 std::uint64_t seed, double tolerance);

// closed-form eigenvalue of the averaging operator on cos(2 pi x_i) for the rotation
double rotation_eigenvalue(const DynamicalSystem& sys, int i);

}  // namespace hypercyc
