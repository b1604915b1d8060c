#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hypercyc {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// exact two-sided binomial interval
Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence = 0.95);

// one-sided bounds at the given confidence
double binomial_upper(std::size_t successes, std::size_t trials, double confidence = 0.95);
double binomial_lower(std::size_t successes, std::size_t trials, double confidence = 0.95);

double normal_quantile(double p);

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  Interval ci(double z) const { return {mean - z * se, mean + z * se}; }
};

// ordered (left to right) summation so results are reproducible
MeanEstimate mean_estimate(std::span<const double> xs);

// Kolmogorov-Smirnov statistic against Uniform[0,1)
double ks_uniform_statistic(std::vector<double> xs);
// asymptotic critical value sqrt(-ln(alpha/2)/2)/sqrt(n)
double ks_critical(std::size_t n, double alpha);

}  // namespace hypercyc
