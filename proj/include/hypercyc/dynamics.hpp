#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypercyc/group.hpp"
#include "hypercyc/stats.hpp"

namespace hypercyc {

// finite set of coordinate conditions x_p = b, sorted by position
class Cylinder {
 public:
  using Cond = std::pair<Element, int>;

  Cylinder() = default;
  // nullopt when two conditions contradict each other
  static std::optional<Cylinder> make(std::vector<Cond> conds);

  const std::vector<Cond>& conds() const { return conds_; }
  std::size_t bits() const { return conds_.size(); }
  double measure() const;
  // the set T_g(C)
  Cylinder translated(const Group& G, const Element& g) const;
  std::optional<Cylinder> intersect(const Cylinder& o) const;
  std::string format(const Group& G) const;

  friend bool operator==(const Cylinder&, const Cylinder&) = default;

 private:
  std::vector<Cond> conds_;
};

enum class SystemKind { Bernoulli, Rotation };

// A point never stores coordinates: its reads are a pure function of (system seed,
// draw, position * offset), plus an optional forced overlay for conditioned draws.
struct PointHandle {
  std::uint64_t draw = 0;
  Element offset;
  std::shared_ptr<const std::vector<Cylinder::Cond>> forced;
};

class DynamicalSystem {
 public:
  static DynamicalSystem bernoulli(const Group& G, std::uint64_t seed);
  // G = Z^d, coordinate i rotated by alpha_i
  static DynamicalSystem rotation(const Group& G, std::vector<double> alpha, std::uint64_t seed);

  SystemKind kind() const { return kind_; }
  const Group& group() const { return G_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& alpha() const { return alpha_; }

  PointHandle sample(std::uint64_t draw) const;
  // Bernoulli only: mu conditioned on the cylinder
  PointHandle sample_in(std::uint64_t draw, const Cylinder& c) const;
  // T_g x
  PointHandle act(const Element& g, const PointHandle& x) const;

  int bit(const PointHandle& x, const Element& position) const;
  double angle(const PointHandle& x, int i) const;
  bool in(const Cylinder& c, const PointHandle& x) const;

 private:
  DynamicalSystem(SystemKind k, Group G, std::vector<double> alpha, std::uint64_t seed)
      : kind_(k), G_(std::move(G)), alpha_(std::move(alpha)), seed_(seed) {}

  SystemKind kind_;
  Group G_;
  std::vector<double> alpha_;
  std::uint64_t seed_;
};

// Cylinders on B_k for k = 0, 1, ... enumerated level by level; index n >= 1 of the
// repeating schedule maps to descriptor ruler(n), so each descriptor recurs forever.
class SetFamily {
 public:
  explicit SetFamily(const Group& G);

  Cylinder descriptor(std::uint64_t d) const;
  static std::uint64_t schedule(std::uint64_t n);
  Cylinder set(std::uint64_t n) const { return descriptor(schedule(n)); }
  bool eval(std::uint64_t n, const DynamicalSystem& sys, const PointHandle& x) const;
  std::uint64_t enumerable() const { return total_; }

 private:
  Group G_;
  std::vector<std::vector<Element>> level_balls_;
  std::vector<std::uint64_t> level_counts_;
  std::uint64_t total_ = 0;
};

struct TowerOptions {
  std::optional<int> marker;             // fixed marker size m
  std::optional<Cylinder> within;        // build E inside this cylinder
  double margin = 0.5;                   // exact mu(B_N E) must be <= margin * eta/2
  std::function<bool(double)> accept;    // extra constraint on mu(B_N E)
  std::size_t samples = 0;               // Monte-Carlo confirmation
  std::size_t conditional_samples = 0;
  std::uint64_t seed = 0;
  double confidence = 0.95;
  int max_marker_bits = 400;
};

struct TowerSpec {
  std::string kind;  // "run" on Z, "box" on Z^d
  int N = 0;
  int marker = 0;
  double eta = 0.0;
  Cylinder base;
  std::vector<Element> ball;         // B_N
  std::vector<Cylinder> translates;  // gE for g in ball
  double base_measure = 0.0;
  double tower_measure = 0.0;
  bool exact_disjoint = false;

  std::size_t samples = 0;
  std::size_t hits = 0;
  std::size_t collisions = 0;
  std::size_t conditional_samples = 0;
  std::size_t conditional_collisions = 0;
  Interval measure_ci;
  bool pass = false;

  // index in `ball` of the unique g with x in gE
  std::optional<std::size_t> locate(const DynamicalSystem& sys, const PointHandle& x) const;
};

TowerSpec rokhlin_tower(const DynamicalSystem& sys, int N, double eta, const TowerOptions& opt);

// Monte-Carlo confirmation of disjointness and measure; fills the sample fields
void confirm_tower(const DynamicalSystem& sys, TowerSpec& t, std::size_t samples,
                   std::size_t conditional_samples, std::uint64_t seed, double confidence);

}  // namespace hypercyc
