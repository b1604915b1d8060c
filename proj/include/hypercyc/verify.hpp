#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypercyc/model.hpp"

namespace hypercyc {

struct PhiResult {
  WeightedVector v;  // f(T_g x) on B_N
  double tail = 0.0; // max|f| sqrt(1 - w(B_N) + tail_bound)
  int N = 0;
};

PhiResult phi(const ModelFunction& f, const DynamicalSystem& sys, const WeightTable& w,
              const PointHandle& x, int N_trunc, int upto = -1);
// same, reusing a precomputed B_N and its weight mass
PhiResult phi(const ModelFunction& f, const DynamicalSystem& sys, const WeightTable& w,
              const PointHandle& x, const std::vector<Element>& ball, double ball_mass,
              int upto = -1);

double ball_mass(const WeightTable& w, const std::vector<Element>& ball);

// ||phi(x) - c||, the center supported inside the truncation ball
DistanceBound phi_distance(const PhiResult& p, const WeightedVector& center, const WeightTable& w);

struct EquivarianceReport {
  std::vector<std::string> elements;
  int N_trunc = 0;
  std::size_t samples = 0;
  std::size_t compared = 0;
  std::size_t mismatches = 0;
  double max_tail = 0.0;
  bool pass = false;
};

// phi(T_h x) against S_h phi(x) coefficient by coefficient on B_{N - |h|}
EquivarianceReport equivariance_check(const ModelFunction& f, const DynamicalSystem& sys,
                                      const WeightTable& w, std::size_t samples,
                                      const std::vector<Element>& hs, int N_trunc,
                                      std::uint64_t seed);

struct SupportRow {
  int level = 0;
  double delta = 0.0;
  double gamma = 0.0;
  double base_measure = 0.0;
  std::size_t hits_in_base = 0, base_trials = 0;
  std::size_t hits_outside = 0, outside_trials = 0;
  std::size_t indeterminate = 0;
  double hit_estimate = 0.0;
  double hit_lower = 0.0;
  bool hit_ok = false;
  std::size_t symdiff = 0, symdiff_trials = 0;
  double symdiff_upper = 0.0;
  bool symdiff_ok = false;
  bool covers_disjoint = false;  // C_{i,0} and C_{i,1} approximants at every recorded stage
};

struct SupportReport {
  int N_trunc = 0;
  std::vector<SupportRow> rows;
  bool pass = false;
};

SupportReport support_and_iso_check(const ModelFunction& f, const DynamicalSystem& sys,
                                    const WeightTable& w, std::size_t samples,
                                    std::size_t base_samples, int N_trunc, std::uint64_t seed,
                                    double confidence);

struct OrbitFrequency {
  std::size_t steps = 0;
  std::size_t inside = 0;
  std::size_t outside = 0;
  std::size_t indeterminate = 0;
  double frequency = 0.0;
  Interval ci;                  // batch means, widened by the indeterminate share
  std::vector<double> running;  // running frequency after each step
  double final_tail = 0.0;
};

// (1/N) sum_{n<=N} 1_U(S_a^n v) for a finite vector whose discarded part has norm <= tail
OrbitFrequency orbit_frequency(const Group& G, const WeightedVector& v, double tail,
                               const Element& a, const BallSpec& U, std::size_t steps,
                               const WeightTable& w, double confidence = 0.95);

// same along a model orbit, using S_a^n phi(x) = phi(T_{a^n} x)
OrbitFrequency model_orbit_frequency(const ModelFunction& f, const DynamicalSystem& sys,
                                     const WeightTable& w, const PointHandle& x,
                                     const Element& a, const BallSpec& U, std::size_t steps,
                                     int N_trunc, double confidence = 0.95);

}  // namespace hypercyc
