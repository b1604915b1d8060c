#include "hypercyc/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "hypercyc/errors.hpp"

namespace hypercyc {

double binomial_upper(std::size_t k, std::size_t n, double confidence) {
  if (n == 0) return 1.0;
  if (k >= n) return 1.0;
  boost::math::beta_distribution<double> b(static_cast<double>(k) + 1, static_cast<double>(n - k));
  return boost::math::quantile(b, confidence);
}

double binomial_lower(std::size_t k, std::size_t n, double confidence) {
  if (n == 0 || k == 0) return 0.0;
  boost::math::beta_distribution<double> b(static_cast<double>(k), static_cast<double>(n - k) + 1);
  return boost::math::quantile(b, 1.0 - confidence);
}

Interval clopper_pearson(std::size_t k, std::size_t n, double confidence) {
  if (k > n) throw DomainError("more successes than trials");
  double tail = (1.0 + confidence) / 2.0;
  return {binomial_lower(k, n, tail), binomial_upper(k, n, tail)};
}

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

MeanEstimate mean_estimate(std::span<const double> xs) {
  MeanEstimate m;
  m.n = xs.size();
  if (xs.empty()) return m;
  double s = 0;
  for (double x : xs) s += x;
  m.mean = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return m;
}

double ks_uniform_statistic(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double x = std::clamp(xs[i], 0.0, 1.0);
    d = std::max({d, (i + 1) / n - x, x - i / n});
  }
  return d;
}

double ks_critical(std::size_t n, double alpha) {
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

}  // namespace hypercyc
