#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypercyc/group.hpp"
#include "hypercyc/measure.hpp"

namespace hypercyc {

struct Entry {
  Element element;
  double coef = 0.0;
};

// finitely supported function G -> R, sorted by element, exact zeros dropped
class WeightedVector {
 public:
  WeightedVector() = default;
  static WeightedVector from_entries(std::vector<Entry> entries);
  static WeightedVector delta(const Element& g, double c = 1.0);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }
  double coef(const Element& g) const;
  double max_abs() const;

  WeightedVector operator+(const WeightedVector& o) const;
  WeightedVector operator-(const WeightedVector& o) const;
  WeightedVector operator*(double c) const;
  friend bool operator==(const WeightedVector& a, const WeightedVector& b);

  std::string to_csv(const Group& G) const;

 private:
  std::vector<Entry> entries_;
};

struct NormEstimate {
  double value = 0.0;  // from stored weights
  double upper = 0.0;  // with tail_bound charged to unstored atoms and to stored ones
  bool outside_support = false;
};

NormEstimate norm_estimate(const WeightedVector& v, const WeightTable& w);
double norm(const WeightedVector& v, const WeightTable& w);
double inner(const WeightedVector& a, const WeightedVector& b, const WeightTable& w);

// (S_g v)(h) = v(h g)
WeightedVector shift(const Group& G, const WeightedVector& v, const Element& g);

struct BallSpec {
  WeightedVector center;
  double radius = 1.0;
  int support_radius = 0;  // N0
};

enum class Membership { Inside, Outside, Indeterminate };

// distance interval from a truncated vector: coefficients on `known` are exact, every
// coordinate outside contributes at most extra_sq (already squared and weighted)
struct DistanceBound {
  double lo = 0.0;
  double hi = 0.0;
  Membership classify(double radius) const {
    if (hi < radius) return Membership::Inside;
    if (lo >= radius) return Membership::Outside;
    return Membership::Indeterminate;
  }
};

DistanceBound distance_bound(const WeightedVector& v, const WeightedVector& center,
                             const WeightTable& w, double extra_sq);

struct NormCertificate {
  std::string generator;
  double bound = 0.0;
  double observed_random = 0.0;
  double observed_atoms = 0.0;
  double observed = 0.0;
  int domain_radius = 0;
  std::size_t domain_size = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t violations = 0;
  WeightedVector witness;
  bool pass = false;
};

// ||S_a|| <= sqrt((2d+1)C) on random vectors and single atoms inside the interior ball
NormCertificate operator_norm_certificate(const Group& G, const WeightTable& w, const Element& a,
                                          std::size_t trials, std::uint64_t seed);

struct SubgroupNormCertificate {
  std::string element;
  double bound = 0.0;     // M_g0
  double observed = 0.0;  // sup w(g g0^-1)/w(g) = ||S_g0||^2 on the domain
  double norm_observed = 0.0;
  int domain_radius = 0;
  std::size_t domain_size = 0;
  bool pass = false;
};

SubgroupNormCertificate subgroup_norm_certificate(const Group& G, const WeightTable& w_G,
                                                  const Element& g0, double bound);

}  // namespace hypercyc
