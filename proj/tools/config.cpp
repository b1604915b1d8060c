#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hypercyc/errors.hpp"
#include "json.hpp"

namespace hypercyc::app {

using json = nlohmann::ordered_json;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

// reads keys from one JSON object and rejects whatever was not asked for
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <class T>
  bool get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return false;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
    return true;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

GroupSpec parse_group(const json& j) {
  Section s(j, "group");
  std::string kind;
  int d = 1;
  require(s.get("kind", kind), "group.kind is required");
  s.get("d", d);
  s.finish();
  GroupSpec g;
  if (kind == "integers") g = GroupSpec::integers();
  else if (kind == "lattice") g = GroupSpec::lattice(d);
  else if (kind == "free") g = GroupSpec::free(d);
  else if (kind == "heisenberg") g = GroupSpec::heisenberg();
  else if (kind == "locally_finite") g = GroupSpec::locally_finite();
  else throw ConfigError("group.kind: unknown group '" + kind + "'");
  if (g.kind == GroupKind::Lattice) require(d >= 1 && d <= 3, "group.d: lattice rank must be 1..3");
  if (g.kind == GroupKind::Free) require(d >= 1 && d <= 2, "group.d: free rank must be 1..2");
  return g;
}

const char* group_kind_name(GroupKind k) {
  switch (k) {
    case GroupKind::Integers: return "integers";
    case GroupKind::Lattice: return "lattice";
    case GroupKind::Free: return "free";
    case GroupKind::Heisenberg: return "heisenberg";
    case GroupKind::LocallyFinite: return "locally_finite";
  }
  return "?";
}

json effective(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["group"] = {{"kind", group_kind_name(c.group.kind)}, {"d", c.group.d}};
  j["weight"] = {{"q", c.weight.q}, {"n_max", c.weight.n_max}};
  j["system"] = {{"kind", c.system}, {"alpha", c.alpha}};
  j["norms"] = {{"trials", c.norms.trials}, {"ratio_max_len", c.norms.ratio_max_len},
                {"subgroup", c.norms.subgroup}};
  j["jrt"] = {{"rotation_steps", c.jrt.rotation_steps}, {"bernoulli_steps", c.jrt.bernoulli_steps},
              {"samples", c.jrt.samples}, {"ratio_tolerance", c.jrt.ratio_tolerance},
              {"sigmas", c.jrt.sigmas}};
  j["tower"] = {{"N", c.tower.N}, {"eta", c.tower.eta}, {"samples", c.tower.samples},
                {"conditional_samples", c.tower.conditional_samples},
                {"marker", c.tower.marker ? json(*c.tower.marker) : json(nullptr)}};
  const auto& m = c.model;
  j["model"] = {{"stages", m.stages}, {"eps1", m.eps1}, {"gamma1", m.gamma1}, {"beta1", m.beta1},
                {"delta_cap", m.delta_cap}, {"delta_fraction", m.delta_fraction}, {"eta0", m.eta0},
                {"ball_indices", m.ball_indices}, {"verify_samples", m.verify_samples},
                {"check_samples", m.check_samples}, {"confidence", m.confidence},
                {"max_marker_bits", m.max_marker_bits}, {"file", c.model_file}};
  j["support"] = {{"samples", c.support.samples}, {"base_samples", c.support.base_samples},
                  {"equivariance_samples", c.support.equivariance_samples},
                  {"shift_radius", c.support.shift_radius}, {"N_trunc", c.support.N_trunc}};
  j["orbit"] = {{"steps", c.orbit.steps}, {"level", c.orbit.level}, {"draw", c.orbit.draw},
                {"measure_samples", c.orbit.measure_samples}};
  j["feldman"] = {{"alpha", c.feldman.alpha}, {"depth", c.feldman.depth},
                  {"points", c.feldman.points}, {"tolerance", c.feldman.tolerance}};
  j["continuous"] = {{"k", c.continuous.k}, {"ell", c.continuous.ell},
                     {"grid_step", c.continuous.grid_step}, {"quad_points", c.continuous.quad_points},
                     {"C", c.continuous.C}, {"chain_n_max", c.continuous.chain_n_max},
                     {"g0_samples", c.continuous.g0_samples}};
  return j;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Section top(root, "config");

  bool has_seed = top.get("seed", c.seed);
  if (seed_override) c.seed = *seed_override, has_seed = true;
  require(has_seed, "seed is required (config key 'seed' or --seed)");

  if (auto g = top.child("group")) c.group = parse_group(*g);
  c.weight = WeightParams::defaults_for(c.group);
  if (auto w = top.child("weight")) {
    Section s(*w, "weight");
    s.get("q", c.weight.q);
    s.get("n_max", c.weight.n_max);
    s.finish();
  }
  require(c.weight.q > 0 && c.weight.q < 1, "weight.q must lie in (0,1)");
  require(c.weight.n_max >= 1 && c.weight.n_max <= 200, "weight.n_max must lie in [1,200]");

  if (auto sj = top.child("system")) {
    Section s(*sj, "system");
    s.get("kind", c.system);
    s.get("alpha", c.alpha);
    s.finish();
  }
  require(c.system == "bernoulli" || c.system == "rotation", "system.kind must be bernoulli or rotation");
  const bool abelian = c.group.kind == GroupKind::Integers || c.group.kind == GroupKind::Lattice;
  if (c.system == "rotation") require(abelian, "rotation systems need Z or Z^d");
  if (abelian) {
    // sqrt(2) - 1, sqrt(5) - 2, sqrt(8) - 2
    if (c.alpha.empty())
      for (int i = 0; i < c.group.d; ++i) c.alpha.push_back(std::sqrt(2.0 + 3.0 * i) - std::floor(std::sqrt(2.0 + 3.0 * i)));
    require(static_cast<int>(c.alpha.size()) == c.group.d, "system.alpha needs one angle per coordinate");
  } else {
    require(c.alpha.empty(), "system.alpha only applies to Z or Z^d");
  }

  if (auto j = top.child("norms")) {
    Section s(*j, "norms");
    s.get("trials", c.norms.trials);
    s.get("ratio_max_len", c.norms.ratio_max_len);
    s.get("subgroup", c.norms.subgroup);
    s.finish();
  }
  require(c.norms.trials >= 1, "norms.trials must be >= 1");
  require(c.norms.ratio_max_len >= 1 && c.norms.ratio_max_len <= 6, "norms.ratio_max_len must lie in [1,6]");

  if (auto j = top.child("jrt")) {
    Section s(*j, "jrt");
    s.get("rotation_steps", c.jrt.rotation_steps);
    s.get("bernoulli_steps", c.jrt.bernoulli_steps);
    s.get("samples", c.jrt.samples);
    s.get("ratio_tolerance", c.jrt.ratio_tolerance);
    s.get("sigmas", c.jrt.sigmas);
    s.finish();
  }
  require(c.jrt.rotation_steps >= 1 && c.jrt.bernoulli_steps >= 1, "jrt steps must be >= 1");
  require(c.jrt.samples >= 2, "jrt.samples must be >= 2");
  require(c.jrt.ratio_tolerance > 0 && c.jrt.sigmas > 0, "jrt tolerances must be positive");

  if (auto j = top.child("tower")) {
    Section s(*j, "tower");
    s.get("N", c.tower.N);
    s.get("eta", c.tower.eta);
    s.get("samples", c.tower.samples);
    s.get("conditional_samples", c.tower.conditional_samples);
    int m = 0;
    if (s.get("marker", m)) c.tower.marker = m;
    s.finish();
  }
  require(c.tower.N >= 0, "tower.N must be >= 0");
  require(c.tower.eta > 0 && c.tower.eta < 1, "tower.eta must lie in (0,1)");

  if (auto j = top.child("model")) {
    Section s(*j, "model");
    auto& m = c.model;
    s.get("stages", m.stages);
    s.get("eps1", m.eps1);
    s.get("gamma1", m.gamma1);
    s.get("beta1", m.beta1);
    s.get("delta_cap", m.delta_cap);
    s.get("delta_fraction", m.delta_fraction);
    s.get("eta0", m.eta0);
    s.get("ball_indices", m.ball_indices);
    s.get("verify_samples", m.verify_samples);
    s.get("check_samples", m.check_samples);
    s.get("confidence", m.confidence);
    s.get("max_marker_bits", m.max_marker_bits);
    s.get("file", c.model_file);
    s.finish();
  }
  c.model.seed = c.seed;
  {
    const auto& m = c.model;
    require(m.stages >= 1 && m.stages <= 12, "model.stages must lie in [1,12]");
    require(m.eps1 > 0 && m.gamma1 > 0 && m.beta1 > 0 && m.eta0 > 0, "model budgets must be positive");
    require(m.delta_cap > 0 && m.delta_fraction > 0 && m.delta_fraction < 1, "model delta settings out of range");
    require(m.confidence > 0 && m.confidence < 1, "model.confidence must lie in (0,1)");
    require(m.verify_samples >= 1 && m.check_samples >= 1, "model sample counts must be >= 1");
    require(m.max_marker_bits >= 1, "model.max_marker_bits must be >= 1");
  }

  if (auto j = top.child("support")) {
    Section s(*j, "support");
    s.get("samples", c.support.samples);
    s.get("base_samples", c.support.base_samples);
    s.get("equivariance_samples", c.support.equivariance_samples);
    s.get("shift_radius", c.support.shift_radius);
    s.get("N_trunc", c.support.N_trunc);
    s.finish();
  }
  require(c.support.shift_radius >= 0 && c.support.N_trunc >= 0, "support radii must be >= 0");

  if (auto j = top.child("orbit")) {
    Section s(*j, "orbit");
    s.get("steps", c.orbit.steps);
    s.get("level", c.orbit.level);
    s.get("draw", c.orbit.draw);
    s.get("measure_samples", c.orbit.measure_samples);
    s.finish();
  }
  require(c.orbit.steps >= 20, "orbit.steps must be >= 20");
  require(c.orbit.level >= 1 && c.orbit.level <= c.model.stages, "orbit.level must name a built stage");

  if (auto j = top.child("feldman")) {
    Section s(*j, "feldman");
    s.get("alpha", c.feldman.alpha);
    s.get("depth", c.feldman.depth);
    s.get("points", c.feldman.points);
    s.get("tolerance", c.feldman.tolerance);
    s.finish();
  }
  require(c.feldman.depth >= 2 && c.feldman.depth <= 1000, "feldman.depth must lie in [2,1000]");

  if (auto j = top.child("continuous")) {
    Section s(*j, "continuous");
    s.get("k", c.continuous.k);
    s.get("ell", c.continuous.ell);
    s.get("grid_step", c.continuous.grid_step);
    s.get("quad_points", c.continuous.quad_points);
    s.get("C", c.continuous.C);
    s.get("chain_n_max", c.continuous.chain_n_max);
    s.get("g0_samples", c.continuous.g0_samples);
    s.finish();
  }
  require(c.continuous.k > 0 && c.continuous.ell > c.continuous.k, "continuous: need 0 < k < ell");
  require(c.continuous.grid_step > 0, "continuous.grid_step must be positive");
  require(c.continuous.chain_n_max >= 1 && c.continuous.chain_n_max <= 14,
          "continuous.chain_n_max must lie in [1,14]");

  top.finish();
  c.canonical = effective(c).dump();
  return c;
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), seed_override);
}

}  // namespace hypercyc::app
