#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hypercyc/group.hpp"

namespace hypercyc {

struct Atom {
  Element element;
  double mass = 0.0;
};

// Finitely supported measure; atoms sorted by element (shortlex), all masses > 0.
class SparseMeasure {
 public:
  SparseMeasure() = default;
  // merges duplicates in input order, drops non-positive masses
  static SparseMeasure from_atoms(std::vector<Atom> atoms);
  static SparseMeasure dirac(const Element& g, double mass = 1.0);
  // caller guarantees sorted, unique, positive
  static SparseMeasure from_sorted(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double total() const { return total_; }
  double mass(const Element& g) const;
  bool contains(const Element& g) const;
  bool is_symmetric(const Group& G) const;
  int support_radius(const Group& G) const;
  SparseMeasure scaled(double c) const;

 private:
  std::vector<Atom> atoms_;
  double total_ = 0.0;
};

// uniform on {e} and the symmetric generators
SparseMeasure step_distribution(const Group& G);

// (mu*nu)(g) = sum_h mu(g h^-1) nu(h); OpenMP over left atoms, bit-identical to serial::convolve
SparseMeasure convolve(const Group& G, const SparseMeasure& mu, const SparseMeasure& nu,
                       std::size_t cap = kDefaultBallCap);

namespace serial {
SparseMeasure convolve(const Group& G, const SparseMeasure& mu, const SparseMeasure& nu,
                       std::size_t cap = kDefaultBallCap);
}

SparseMeasure convolution_power(const Group& G, const SparseMeasure& rho, int n,
                                std::size_t cap = kDefaultBallCap);
// index 0 holds delta_e
std::vector<SparseMeasure> convolution_powers(const Group& G, const SparseMeasure& rho, int n_max,
                                              std::size_t cap = kDefaultBallCap);

struct WeightParams {
  double q = 0.5;
  int n_max = 40;

  double C() const { return 1.0 / q; }
  double p(int n) const;
  double tail() const;
  void validate() const;
  static WeightParams defaults_for(const GroupSpec& spec);
};

class WeightTable {
 public:
  WeightTable() = default;
  WeightTable(WeightParams params, std::vector<Atom> atoms, int support_radius);

  const WeightParams& params() const { return params_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double weight(const Element& g) const;
  bool stored(const Element& g) const;
  double tail_bound() const { return params_.tail(); }
  double stored_mass() const { return stored_mass_; }
  int support_radius() const { return support_radius_; }
  // radius where truncation bias is negligible against the ratio bounds
  int interior_radius() const { return support_radius_ / 2; }
  std::size_t size() const { return atoms_.size(); }
  std::string to_csv(const Group& G) const;

 private:
  WeightParams params_;
  std::vector<Atom> atoms_;
  double stored_mass_ = 0.0;
  int support_radius_ = 0;
};

WeightTable build_weight(const Group& G, const WeightParams& params,
                         std::size_t cap = kDefaultBallCap);
WeightTable build_weight(const Group& G, const SparseMeasure& step, const WeightParams& params,
                         std::size_t cap = kDefaultBallCap);

struct RatioCertificate {
  std::string element;
  int length = 0;
  double bound = 0.0;        // M_b
  double lower_bound = 0.0;  // 1/M_b
  double observed_max = 0.0;
  double observed_min = 0.0;
  int domain_radius = 0;
  std::size_t domain_size = 0;
  std::size_t violations = 0;
  bool pass = false;
};

// M_b = ((2d+1)C)^{|b|}
double ratio_bound(const Group& G, const WeightParams& params, const Element& b);

// sup/inf of w(gb)/w(g) over g, gb in the interior ball
RatioCertificate weight_ratio(const Group& G, const WeightTable& w, const Element& b);
RatioCertificate weight_ratio(const Group& G, const WeightTable& w, const Element& b, double bound);

// rho(gb)/rho(g) over g, gb in supp(rho) with radius <= domain_radius
RatioCertificate measure_ratio(const Group& G, const SparseMeasure& rho, const Element& b,
                               double bound, int domain_radius);

// w_amb restricted to the image of sub.ball(radius), keeping only images inside the
// interior of w_amb, renormalized to a probability measure on the subgroup
SparseMeasure restrict_renormalize(const WeightTable& w_amb, const Embedding& emb, int radius);

}  // namespace hypercyc
