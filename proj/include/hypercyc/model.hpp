#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hypercyc/balls.hpp"
#include "hypercyc/dynamics.hpp"
#include "hypercyc/measure.hpp"
#include "hypercyc/stats.hpp"
#include "hypercyc/weighted_space.hpp"

namespace hypercyc {

struct ModelConfig {
  int stages = 4;
  double eps1 = 0.1;
  double gamma1 = 0.05;
  double beta1 = 0.02;
  double delta_cap = 0.01;
  double delta_fraction = 0.9;  // delta_i = fraction * mu(E_i) / (1 + 1/i), capped
  double eta0 = 0.1;
  std::vector<std::uint64_t> ball_indices;  // stage i uses entry i-1, default i-1
  std::size_t verify_samples = 1000;        // draws conditioned on a tower base
  std::size_t check_samples = 20000;        // unconditional draws
  double confidence = 0.95;
  std::uint64_t seed = 1;
  int max_marker_bits = 400;
};

struct LevelBudget {
  double epsilon = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
};

// min over levels of the four budgets, scaled by 1/(2n(n+1))
double compute_eta(int n, std::span<const LevelBudget> levels);

struct ValueNode {
  double value = 0.0;
  std::int64_t parent = -1;          // index into this stage's pre-node list
  std::vector<std::uint8_t> sides;   // side (0 or 1) at levels 1..n
};

struct BornValue {
  double value = 0.0;
  std::vector<std::uint8_t> sides;
};

struct LevelCheck {
  int level = 0;
  double gap = 0.0;            // min distance between the level's 0-side and 1-side values
  double required = 0.0;       // epsilon_i (1 + 1/n)
  double cover_gap = 0.0;      // gap - beta_n
  double cover_required = 0.0; // epsilon_i (1 + 1/(n+1))
  bool separated = false;
  bool covers_separated = false;

  // 3_n
  std::size_t exceptions = 0;
  std::size_t exception_trials = 0;
  double exception_budget = 0.0;
  double exception_upper = 0.0;
  double exception_certified = 0.0;  // sum of later tower measures
  bool exceptions_ok = false;

  // 4_n
  std::size_t hits = 0;
  std::size_t hit_trials = 0;
  double hit_measure_lower = 0.0;    // mu(E_i) * lower CI of P(hit | E_i)
  double hit_required = 0.0;         // delta_i (1 + 1/n)
  bool hits_ok = false;
};

struct StageChecks {
  std::vector<LevelCheck> levels;
  bool nested = false;
  double worst_nesting_slack = 0.0;
  // hit_ball
  double tail_contribution = 0.0;    // max|f^| sqrt(tail mass)
  std::size_t hit_samples = 0;
  std::size_t hit_inside = 0;
  double max_restricted_distance = 0.0;
  double max_distance_upper = 0.0;
  bool exact_patch = false;          // f^_n(T_g x) is the recorded patch node for x in E, g in B_N
  // 5_n
  double l4_mc = 0.0;                // mean f^4
  double l4_mc_se = 0.0;
  double l4_certified = 0.0;
  bool l4_ok = false;
  bool pass = false;
};

struct StageRecord {
  int n = 0;
  std::uint64_t ball_index = 0;
  BallSpec ball;
  double eta = 0.0;
  int N = 0;
  double tail_mass = 0.0;
  double max_pre = 0.0;  // max|f^_n| used in the tail criterion
  TowerSpec tower;
  std::vector<std::uint32_t> patch_nodes;  // per element of tower.ball
  std::vector<BornValue> born;
  std::size_t snapped = 0;
  double patch_max = 0.0;
  std::uint64_t set_index = 0;
  Cylinder set;
  double split = 0.0;
  std::vector<ValueNode> nodes;
  LevelBudget budget;  // epsilon_n, beta_n, delta_n, gamma_n
  StageChecks checks;
};

class ModelFunction {
 public:
  ModelFunction() = default;
  ModelFunction(const Group& G, ModelConfig cfg, std::vector<StageRecord> stages)
      : G_(G), cfg_(std::move(cfg)), stages_(std::move(stages)) {}

  const Group& group() const { return G_; }
  const ModelConfig& config() const { return cfg_; }
  const std::vector<StageRecord>& stages() const { return stages_; }
  std::vector<StageRecord>& mutable_stages() { return stages_; }
  int stage_count() const { return static_cast<int>(stages_.size()); }

  struct Eval {
    std::uint32_t node = 0;
    double value = 0.0;
  };
  // f_upto(x); upto < 0 means all stages, upto = 0 gives f_0 = 0
  Eval eval(const DynamicalSystem& sys, const PointHandle& x, int upto = -1) const;
  double operator()(const DynamicalSystem& sys, const PointHandle& x, int upto = -1) const {
    return eval(sys, x, upto).value;
  }
  double max_abs(int upto = -1) const;
  // value of node p in the pre-node list of stage n (1-based)
  double pre_value(int n, std::uint32_t p) const;
  const std::vector<std::uint8_t>& pre_sides(int n, std::uint32_t p) const;
  std::size_t pre_count(int n) const;
  std::vector<LevelBudget> budgets(int upto = -1) const;

 private:
  Group G_{GroupSpec::integers()};
  ModelConfig cfg_;
  std::vector<StageRecord> stages_;
};

// 5_n bound: (sum s)^4 + sum_k mu(R_k) (P_k + sum_{l>=k} s_l)^4
double certified_l4(const std::vector<StageRecord>& stages);

// builds stages one at a time; every stage is checked before the next one starts
ModelFunction build_model(const DynamicalSystem& sys, const WeightTable& w, const ModelConfig& cfg);

// re-run the exact checks (1_n, 2_n, nesting) from recorded history
struct HistoryAudit {
  bool separated = true;
  bool covers_separated = true;
  bool nested = true;
  bool range_doubles = true;  // |V^{(n)}| = 2 |pre-nodes|
  std::vector<std::string> failures;
  bool pass() const { return separated && covers_separated && nested && range_doubles; }
};
HistoryAudit audit_history(const ModelFunction& f);

std::string model_to_json(const ModelFunction& f);
ModelFunction model_from_json(const std::string& s, const DynamicalSystem& sys);

}  // namespace hypercyc
