#include "pipelines.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "hypercyc/continuous.hpp"
#include "hypercyc/errors.hpp"
#include "hypercyc/feldman.hpp"
#include "hypercyc/markov.hpp"
#include "hypercyc/random.hpp"
#include "hypercyc/verify.hpp"

namespace hypercyc::app {

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"weights", "norms", "jrt",     "tower",      "build",
                                             "support", "orbit", "feldman", "continuous", "all"};
  return c;
}

namespace {

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) s += (s.empty() ? "" : ",") + c;
  return s + "\n";
}

std::string yes(bool b) { return b ? "1" : "0"; }

class Context {
 public:
  Context(const ExperimentConfig& cfg, Report& rep) : cfg(cfg), rep(rep), G(cfg.group) {}

  const ExperimentConfig& cfg;
  Report& rep;
  Group G;

  bool finitely_generated() const { return G.spec().finitely_generated(); }
  bool abelian() const {
    return G.spec().kind == GroupKind::Integers || G.spec().kind == GroupKind::Lattice;
  }

  const WeightTable& weights() {
    if (!finitely_generated()) throw ConfigError("weights need a finitely generated group");
    if (!w_) w_ = build_weight(G, cfg.weight);
    return *w_;
  }
  const DynamicalSystem& bernoulli() {
    if (!bern_) bern_.emplace(DynamicalSystem::bernoulli(G, cfg.seed));
    return *bern_;
  }
  // nullptr when the construction stopped; the failure is already on the report
  const ModelFunction* model() {
    if (model_tried_) return model_ ? &*model_ : nullptr;
    model_tried_ = true;
    if (!abelian()) throw ConfigError("model building needs Z or Z^d (tower bases are runs or boxes)");
    if (!cfg.model_file.empty()) {
      std::ifstream in(cfg.model_file);
      if (!in) throw ConfigError("cannot read model file '" + cfg.model_file + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      try {
        model_ = model_from_json(ss.str(), bernoulli());
      } catch (const std::exception& e) {
        throw ConfigError(std::string("bad model file: ") + e.what());
      }
      return &*model_;
    }
    try {
      model_ = build_model(bernoulli(), weights(), cfg.model);
    } catch (const StageError& e) {
      rep.check("build.construction", "every stage admits N, a tower and separated values", 0, 1, false);
      rep.attach("model_partial.json", e.history + "\n");
      stage_error_ = e.what();
      return nullptr;
    }
    return &*model_;
  }
  const std::string& stage_error() const { return stage_error_; }

  int truncation() {
    if (cfg.support.N_trunc > 0) return cfg.support.N_trunc;
    int N = 0;
    for (const auto& st : model_->stages()) N = std::max(N, st.N);
    return N;
  }

 private:
  std::optional<WeightTable> w_;
  std::optional<DynamicalSystem> bern_;
  std::optional<ModelFunction> model_;
  bool model_tried_ = false;
  std::string stage_error_;
};

void run_weights(Context& c) {
  const auto& w = c.weights();
  const auto& G = c.G;
  c.rep.info("weights.stored_atoms", "supp w inside B_{Nmax * radius(rho)}", w.support_radius(),
             static_cast<double>(w.size()), true);
  const double expect = 1.0 - w.tail_bound();
  c.rep.check("weights.mass", "sum_{n<=Nmax} p_n = 1 - q^Nmax", expect, w.stored_mass(),
              std::abs(w.stored_mass() - expect) < 1e-12);
  double asym = 0;
  for (const auto& a : w.atoms())
    asym = std::max(asym, std::abs(a.mass - w.weight(G.inverse(a.element))) / a.mass);
  c.rep.check("weights.symmetric", "w(g) = w(g^-1)", 1e-12, asym, asym <= 1e-12);
  c.rep.info("weights.identity", "w(e)", 0, w.weight(G.identity()), true);
  c.rep.table("weights", w.to_csv(G));
}

void run_norms(Context& c) {
  const auto& w = c.weights();
  const auto& G = c.G;
  const auto& cfg = c.cfg;
  std::string csv = csv_row({"generator", "bound", "observed", "observed_random", "observed_atoms",
                             "domain_radius", "domain_size", "trials", "violations", "pass"});
  const auto& gens = G.generators();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    auto nc = operator_norm_certificate(G, w, gens[i], cfg.norms.trials, derive_seed(cfg.seed, 81, i));
    c.rep.check("norms.S_" + nc.generator, "||S_a|| <= sqrt((2d+1)C)", nc.bound, nc.observed, nc.pass);
    csv += csv_row({nc.generator, num(nc.bound), num(nc.observed), num(nc.observed_random),
                    num(nc.observed_atoms), std::to_string(nc.domain_radius),
                    std::to_string(nc.domain_size), std::to_string(nc.trials),
                    std::to_string(nc.violations), yes(nc.pass)});
  }
  c.rep.table("norms", csv);

  std::string rcsv = csv_row({"b", "length", "bound", "observed_min", "observed_max", "domain_radius",
                              "domain_size", "violations", "pass"});
  std::vector<double> worst_hi(cfg.norms.ratio_max_len + 1, 0.0), worst_lo(cfg.norms.ratio_max_len + 1, 1e300);
  std::vector<std::size_t> viol(cfg.norms.ratio_max_len + 1, 0);
  std::vector<double> bound(cfg.norms.ratio_max_len + 1, 0.0);
  for (const auto& b : G.ball(cfg.norms.ratio_max_len)) {
    if (b == G.identity()) continue;
    auto rc = weight_ratio(G, w, b);
    worst_hi[rc.length] = std::max(worst_hi[rc.length], rc.observed_max);
    worst_lo[rc.length] = std::min(worst_lo[rc.length], rc.observed_min);
    viol[rc.length] += rc.violations;
    bound[rc.length] = rc.bound;
    rcsv += csv_row({rc.element, std::to_string(rc.length), num(rc.bound), num(rc.observed_min),
                     num(rc.observed_max), std::to_string(rc.domain_radius),
                     std::to_string(rc.domain_size), std::to_string(rc.violations), yes(rc.pass)});
  }
  for (int L = 1; L <= cfg.norms.ratio_max_len; ++L) {
    c.rep.check("norms.ratio_len" + std::to_string(L) + ".upper", "w(gb)/w(g) <= M_b = ((2d+1)C)^|b|",
                bound[L], worst_hi[L], viol[L] == 0 && worst_hi[L] <= bound[L]);
    c.rep.check("norms.ratio_len" + std::to_string(L) + ".lower", "w(gb)/w(g) >= 1/M_b", 1 / bound[L],
                worst_lo[L], viol[L] == 0 && worst_lo[L] >= 1 / bound[L]);
  }
  c.rep.table("ratios", rcsv);

  if (cfg.norms.subgroup && G.spec().kind == GroupKind::Free && G.rank() == 2) {
    Group Z(GroupSpec::integers());
    const Element a = G.generator(0, false);
    Embedding emb(Z, G, {a}, derive_seed(cfg.seed, 82, 0));
    auto rhoG = restrict_renormalize(w, emb, w.interior_radius());
    const double M = ratio_bound(G, cfg.weight, a);
    const Element one = Z.generator(0, false);
    auto mr = measure_ratio(Z, rhoG, one, M, rhoG.support_radius(Z));
    c.rep.check("norms.subgroup.rho_ratio", "1/M_a <= rho_G(n+1)/rho_G(n) <= M_a on supp rho_G", M,
                std::max(mr.observed_max, 1 / mr.observed_min), mr.pass);
    WeightParams pz = WeightParams::defaults_for(Z.spec());
    pz.q = cfg.weight.q;
    auto wG = build_weight(Z, rhoG, pz);
    auto wr = weight_ratio(Z, wG, one, M);
    c.rep.check("norms.subgroup.weight_ratio", "1/M_a <= w_G(n+1)/w_G(n) <= M_a", M,
                std::max(wr.observed_max, 1 / wr.observed_min), wr.pass);
    auto sc = subgroup_norm_certificate(Z, wG, one, M);
    c.rep.check("norms.subgroup.S", "||S_a||^2 <= M_a on the subgroup space", M, sc.observed, sc.pass);
    std::string sub = csv_row({"n", "mass"});
    for (const auto& at : rhoG.atoms()) sub += csv_row({Z.format(at.element), num(at.mass)});
    c.rep.table("subgroup_rho", sub);
  }
}

void run_jrt(Context& c) {
  if (!c.finitely_generated()) throw ConfigError("jrt needs a finitely generated group");
  const auto& G = c.G;
  const auto& cfg = c.cfg;
  const auto step = step_distribution(G);
  std::string csv = csv_row({"system", "n", "sup_dev", "l2_dev", "mean_sq_dev", "mean_sq_se",
                             "predicted_l2", "ratio"});
  auto rows_csv = [&](const std::string& name, const JrtReport& r) {
    for (const auto& row : r.rows)
      csv += csv_row({name, std::to_string(row.n), num(row.sup_dev), num(row.l2_dev),
                      num(row.mean_sq_dev), num(row.mean_sq_se), num(row.predicted_l2), num(row.ratio)});
  };

  {
    const auto& sys = c.bernoulli();
    auto cyl = Cylinder::make({{G.identity(), 1}});
    auto f = Observable::indicator(*cyl);
    // rho^{*n} lives on B_n; past the weight depth the ball cap may not hold it
    const int steps = std::min(cfg.jrt.bernoulli_steps, cfg.weight.n_max);
    c.rep.info("jrt.bernoulli.steps", "n <= min(requested, Nmax)", cfg.jrt.bernoulli_steps, steps,
               steps == cfg.jrt.bernoulli_steps);
    auto powers = convolution_powers(G, step, steps);
    auto r = jrt_convergence_report(sys, f, powers, cfg.jrt.samples, derive_seed(cfg.seed, 83, 0), 1.0);
    double worst_z = 0;
    bool ok = true;
    for (const auto& row : r.rows) {
      double pred = row.predicted_l2 * row.predicted_l2;
      double diff = std::abs(row.mean_sq_dev - pred);
      if (row.mean_sq_se > 0) worst_z = std::max(worst_z, diff / row.mean_sq_se);
      else if (diff > 1e-12) ok = false;
    }
    ok = ok && worst_z <= cfg.jrt.sigmas;
    c.rep.check("jrt.bernoulli.variance", "E|A^n 1_C - mu(C)|^2 = sum_g rho^{*n}(g)^2 / 4", cfg.jrt.sigmas,
                worst_z, ok);
    c.rep.check("jrt.bernoulli.contraction", "|A^n f| <= ||f||_inf", 1, r.contraction ? 1 : 0, r.contraction);
    c.rep.check("jrt.bernoulli.positivity", "f >= 0 implies A^n f >= 0", 1, r.positivity ? 1 : 0, r.positivity);
    c.rep.check("jrt.bernoulli.trend", "deviation envelope non-increasing within 3 SE", 1, r.trend ? 1 : 0, r.trend);
    c.rep.info("jrt.bernoulli.aperiodicity", "rho(e) > 0", 0, r.aperiodicity_witness, r.aperiodicity_witness > 0);
    rows_csv("bernoulli", r);
  }

  if (c.abelian()) {
    auto sys = DynamicalSystem::rotation(G, cfg.alpha, cfg.seed);
    auto f = Observable::cosine(0);
    auto powers = convolution_powers(G, step, cfg.jrt.rotation_steps);
    auto r = jrt_convergence_report(sys, f, powers, cfg.jrt.samples, derive_seed(cfg.seed, 84, 0), 1.0);
    const double lam = std::abs(rotation_eigenvalue(sys, 0));
    double worst = 0;
    for (const auto& row : r.rows)
      if (row.n > 0) worst = std::max(worst, std::abs(row.ratio - lam) / lam);
    c.rep.check("jrt.rotation.ratio", "|A^n cos| decays by |(1 + 2(d-1) + 2cos 2 pi alpha)/(2d+1)| per step",
                cfg.jrt.ratio_tolerance, worst, worst <= cfg.jrt.ratio_tolerance);
    c.rep.info("jrt.rotation.eigenvalue", "(1 + 2(d-1) + 2cos 2 pi alpha)/(2d+1)", 0,
               rotation_eigenvalue(sys, 0), true);
    c.rep.check("jrt.rotation.contraction", "|A^n f| <= ||f||_inf", 1, r.contraction ? 1 : 0, r.contraction);
    rows_csv("rotation", r);
  }
  c.rep.table("jrt", csv);
}

void run_tower(Context& c) {
  if (!c.abelian()) throw ConfigError("towers are built on Z or Z^d");
  const auto& cfg = c.cfg;
  TowerOptions opt;
  opt.marker = cfg.tower.marker;
  opt.samples = cfg.tower.samples;
  opt.conditional_samples = cfg.tower.conditional_samples;
  opt.seed = derive_seed(cfg.seed, 85, 0);
  opt.max_marker_bits = cfg.model.max_marker_bits;
  TowerSpec t;
  try {
    t = rokhlin_tower(c.bernoulli(), cfg.tower.N, cfg.tower.eta, opt);
  } catch (const TowerError& e) {
    std::string hint = e.suggested_marker > 0 ? " (try marker " + std::to_string(e.suggested_marker) + ")" : "";
    throw ConfigError(std::string("tower: ") + e.what() + hint);
  }
  c.rep.check("tower.exact_disjoint", "gE cap hE = empty for g != h in B_N (cylinder algebra)", 0,
              t.exact_disjoint ? 0 : 1, t.exact_disjoint);
  c.rep.check("tower.collisions", "no sampled x lies in two translates", 0, t.collisions, t.collisions == 0);
  c.rep.check("tower.conditional_collisions", "no x in E has T_g x in E for g in B_{2N} \\ e", 0,
              t.conditional_collisions, t.conditional_collisions == 0);
  c.rep.check("tower.measure", "mu(B_N E) < eta/2", t.eta / 2, t.measure_ci.hi,
              t.measure_ci.hi < t.eta / 2, t.measure_ci);
  c.rep.info("tower.exact_measure", "|B_N| mu(E)", t.eta / 2, t.tower_measure, t.tower_measure < t.eta / 2);
  std::string csv = csv_row({"key", "value"});
  csv += csv_row({"kind", t.kind});
  csv += csv_row({"N", std::to_string(t.N)});
  csv += csv_row({"marker", std::to_string(t.marker)});
  csv += csv_row({"base_bits", std::to_string(t.base.bits())});
  csv += csv_row({"ball_size", std::to_string(t.ball.size())});
  csv += csv_row({"base_measure", num(t.base_measure)});
  csv += csv_row({"tower_measure", num(t.tower_measure)});
  csv += csv_row({"samples", std::to_string(t.samples)});
  csv += csv_row({"hits", std::to_string(t.hits)});
  csv += csv_row({"collisions", std::to_string(t.collisions)});
  csv += csv_row({"conditional_samples", std::to_string(t.conditional_samples)});
  csv += csv_row({"conditional_collisions", std::to_string(t.conditional_collisions)});
  csv += csv_row({"ci_lo", num(t.measure_ci.lo)});
  csv += csv_row({"ci_hi", num(t.measure_ci.hi)});
  c.rep.table("tower", csv);
}

void run_build(Context& c) {
  const ModelFunction* f = c.model();
  if (!f) return;
  auto& rep = c.rep;
  std::string csv = csv_row({"n", "ball_index", "radius", "N0", "eta", "N", "tail_mass", "marker",
                             "base_measure", "tower_measure", "born", "snapped", "split", "nodes",
                             "epsilon", "beta", "delta", "gamma", "l4_mc", "l4_certified", "pass"});
  for (const auto& st : f->stages()) {
    const auto& ck = st.checks;
    const std::string p = "build.stage" + std::to_string(st.n) + ".";
    for (const auto& lc : ck.levels) {
      const std::string l = "level" + std::to_string(lc.level);
      rep.check(p + "separation." + l, "min |V_{i,0} - V_{i,1}| >= eps_i (1 + 1/n)", lc.required, lc.gap,
                lc.separated);
      rep.check(p + "covers." + l, "gap - beta_n >= eps_i (1 + 1/(n+1))", lc.cover_required, lc.cover_gap,
                lc.covers_separated);
      Interval eci{0.0, lc.exception_upper};
      rep.check(p + "exceptions." + l, "mu(side_i(f_n) != 1_{A_i^c}) <= gamma_i (1 - 1/n)",
                lc.exception_budget, lc.exception_budget == 0 ? lc.exception_certified : lc.exception_upper,
                lc.exceptions_ok, eci);
      Interval hci{lc.hit_measure_lower, st.tower.base_measure};
      rep.check(p + "hits." + l, "mu(E_i^(n)) >= delta_i (1 + 1/n)", lc.hit_required, lc.hit_measure_lower,
                lc.hits_ok, hci);
    }
    if (st.n >= 2)
      rep.check(p + "nesting", "|v - parent| + beta_n/2 <= beta_{n-1}/2", 0, ck.worst_nesting_slack, ck.nested);
    rep.check(p + "hit_ball", "||phi_{f_n}(x) - xi_n|| < r_n for x in E_n", st.ball.radius, ck.max_distance_upper,
              ck.hit_inside == ck.hit_samples && ck.hit_samples > 0);
    rep.check(p + "patch", "f^_n(T_g x) is the recorded patch value on B_N for x in E_n", 0,
              ck.exact_patch ? 0 : 1, ck.exact_patch);
    double snap_dev = 0;
    for (std::size_t gi = 0; gi < st.tower.ball.size(); ++gi) {
      const auto& g = st.tower.ball[gi];
      double target = c.G.word_length(g) <= st.ball.support_radius ? st.ball.center.coef(g) : 0.0;
      snap_dev = std::max(snap_dev, std::abs(f->pre_value(st.n, st.patch_nodes[gi]) - target));
    }
    rep.info(p + "patch_deviation", "max_g |patch(g) - xi_n(g)| (snapped targets)", st.ball.radius / 2, snap_dev,
             true);
    rep.check(p + "l4_mc", "E f_n^4 + 3 SE < 1", 1, ck.l4_mc + 3 * ck.l4_mc_se, ck.l4_mc + 3 * ck.l4_mc_se < 1);
    rep.check(p + "l4_certified", "(sum s)^4 + sum mu(R_k)(P_k + sum s)^4 < 1", 1, ck.l4_certified,
              ck.l4_certified < 1);
    csv += csv_row({std::to_string(st.n), std::to_string(st.ball_index), num(st.ball.radius),
                    std::to_string(st.ball.support_radius), num(st.eta), std::to_string(st.N),
                    num(st.tail_mass), std::to_string(st.tower.marker), num(st.tower.base_measure),
                    num(st.tower.tower_measure), std::to_string(st.born.size()), std::to_string(st.snapped),
                    num(st.split), std::to_string(st.nodes.size()), num(st.budget.epsilon),
                    num(st.budget.beta), num(st.budget.delta), num(st.budget.gamma), num(ck.l4_mc),
                    num(ck.l4_certified), yes(ck.pass)});
  }
  auto audit = audit_history(*f);
  rep.check("build.audit", "1_n, 2_n and nesting re-derived from the stored history", 0,
            static_cast<double>(audit.failures.size()), audit.pass());
  rep.table("stages", csv);
  rep.attach("model.json", model_to_json(*f) + "\n");
}

void run_support(Context& c) {
  const ModelFunction* f = c.model();
  if (!f) return;
  const auto& cfg = c.cfg;
  const auto& G = c.G;
  const auto& sys = c.bernoulli();
  const auto& w = c.weights();
  const int N = c.truncation();

  const int Neq = std::max(N, cfg.support.shift_radius);
  auto eq = equivariance_check(*f, sys, w, cfg.support.equivariance_samples, G.ball(cfg.support.shift_radius),
                               Neq, derive_seed(cfg.seed, 86, 0));
  c.rep.check("support.equivariance", "phi_f(T_h x) = S_h phi_f(x) coefficientwise on B_{N-|h|}", 0,
              static_cast<double>(eq.mismatches), eq.pass);
  c.rep.info("support.equivariance_compared", "coefficients compared", 0, static_cast<double>(eq.compared),
             eq.compared > 0);

  auto sr = support_and_iso_check(*f, sys, w, cfg.support.samples, cfg.support.base_samples, N,
                                  derive_seed(cfg.seed, 87, 0), cfg.model.confidence);
  std::string csv = csv_row({"level", "delta", "gamma", "base_measure", "hits_in_base", "base_trials",
                             "hits_outside", "outside_trials", "indeterminate", "hit_estimate", "hit_lower",
                             "symdiff", "symdiff_trials", "symdiff_upper", "covers_disjoint"});
  for (const auto& r : sr.rows) {
    const std::string p = "support.level" + std::to_string(r.level) + ".";
    c.rep.check(p + "hit", "mu(phi_f in U_i) >= delta_i", r.delta, r.hit_lower, r.hit_ok,
                Interval{r.hit_lower, 1.0});
    c.rep.check(p + "symdiff", "mu(f^-1(V_{i,0}) sym A_i) < gamma_i", r.gamma, r.symdiff_upper, r.symdiff_ok,
                Interval{0.0, r.symdiff_upper});
    c.rep.check(p + "covers", "C_{i,0} cap C_{i,1} = empty at every stage", 0, r.covers_disjoint ? 0 : 1,
                r.covers_disjoint);
    c.rep.info(p + "indeterminate", "draws inside the truncation guard band", 0,
               static_cast<double>(r.indeterminate), true);
    csv += csv_row({std::to_string(r.level), num(r.delta), num(r.gamma), num(r.base_measure),
                    std::to_string(r.hits_in_base), std::to_string(r.base_trials), std::to_string(r.hits_outside),
                    std::to_string(r.outside_trials), std::to_string(r.indeterminate), num(r.hit_estimate),
                    num(r.hit_lower), std::to_string(r.symdiff), std::to_string(r.symdiff_trials),
                    num(r.symdiff_upper), yes(r.covers_disjoint)});
  }
  c.rep.table("support", csv);
}

void run_orbit(Context& c) {
  const ModelFunction* f = c.model();
  if (!f) return;
  const auto& cfg = c.cfg;
  const auto& G = c.G;
  const auto& sys = c.bernoulli();
  const auto& w = c.weights();
  const int N = c.truncation();
  const auto& U = f->stages()[cfg.orbit.level - 1].ball;
  const Element a = G.generators()[0];
  const auto x = sys.sample(derive_seed(cfg.seed, 71, cfg.orbit.draw));

  auto of = model_orbit_frequency(*f, sys, w, x, a, U, cfg.orbit.steps, N, cfg.model.confidence);
  c.rep.check("orbit.frequency", "(1/N) #{n <= N : S_a^n phi_f(x) in U} bounded below", 0, of.ci.lo,
              of.ci.lo > 0, of.ci);

  // mu(phi_f in U) from independent draws
  const auto ball = G.ball(N);
  const double mass = ball_mass(w, ball);
  std::vector<Membership> ms(cfg.orbit.measure_samples);
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < ms.size(); ++s) {
    auto y = sys.sample(derive_seed(cfg.seed, 72, s));
    ms[s] = phi_distance(phi(*f, sys, w, y, ball, mass), U.center, w).classify(U.radius);
  }
  std::size_t in = 0, indet = 0;
  for (auto m : ms) in += m == Membership::Inside, indet += m == Membership::Indeterminate;
  auto mci = clopper_pearson(in, ms.size(), cfg.model.confidence);
  mci.hi = std::min(1.0, clopper_pearson(in + indet, ms.size(), cfg.model.confidence).hi);
  const bool overlap = of.ci.lo <= mci.hi && mci.lo <= of.ci.hi;
  c.rep.check("orbit.consistency", "orbit frequency CI meets the CI of mu(phi_f in U)",
              double(in) / ms.size(), of.frequency, overlap, mci);

  const double half = of.running[of.steps / 2 - 1];
  c.rep.info("orbit.stability", "|freq(N) - freq(N/2)| <= CI width", of.ci.hi - of.ci.lo,
             std::abs(of.frequency - half), std::abs(of.frequency - half) <= of.ci.hi - of.ci.lo);

  // the whole-space surrogate is always visited
  auto p = phi(*f, sys, w, x, ball, mass);
  const std::size_t k = 50;
  BallSpec big{WeightedVector{}, (norm(p.v, w) + p.tail + 1) *
                                     std::pow(std::sqrt((2 * G.rank() + 1) * w.params().C()), k + 1), 0};
  auto triv = orbit_frequency(G, p.v, p.tail, a, big, k, w);
  c.rep.check("orbit.surrogate", "a ball containing the whole orbit is visited at every step", 1,
              triv.frequency, triv.frequency == 1.0);

  std::string csv = csv_row({"n", "frequency"});
  for (std::size_t n = 0; n < of.running.size(); ++n) csv += csv_row({std::to_string(n + 1), num(of.running[n])});
  c.rep.table("orbit", csv);
}

void run_feldman(Context& c) {
  const auto& fc = c.cfg.feldman;
  auto r = feldman_baseline(fc.alpha, fc.depth, fc.points, derive_seed(c.cfg.seed, 88, 0), fc.tolerance);
  c.rep.check("feldman.conjugacy", "phi(fz) = T phi(z), (Tu)_n = 2u_{n+1}", fc.tolerance, r.max_error,
              r.max_error < fc.tolerance);
  c.rep.check("feldman.norm", "||phi(z)||^2 = (1 - 4^-depth)/3", 1e-12, r.max_norm_sq_error,
              r.max_norm_sq_error < 1e-12);
  c.rep.info("feldman.tail", "2^-depth sup ||phi_0||", 0, r.tail, true);
}

void run_continuous(Context& c) {
  const auto& cc = c.cfg.continuous;
  auto r = domination_constant_real(cc.k, cc.ell, cc.grid_step, cc.quad_points, cc.C);
  auto& rep = c.rep;
  rep.check("continuous.psi_quadrature", "psi(t) = max(0, 2l - |t|)", 1e-6, r.quad_max_error,
            r.quad_max_error < 1e-6);
  rep.check("continuous.u", "u = min_{KL} psi", r.u_closed, r.u_grid, std::abs(r.u_grid - r.u_closed) < 1e-12);
  rep.check("continuous.D", "D = 2/u", 2 / r.u_closed, r.D, std::abs(r.D - 2 / r.u_closed) < 1e-12);
  rep.check("continuous.window_domination", "rho * delta_k <= D rho * rho on [-l, l]", 0,
            static_cast<double>(r.window_violations), r.window_violations == 0);
  rep.info("continuous.support_domination", "rho * delta_k <= D rho * rho on supp(rho * delta_k)", r.D,
           r.support_tight_D, r.support_violations == 0);
  rep.check("continuous.support_domination_corrected", "rho * delta_k <= (2 lambda(L)/u) rho * rho",
            r.support_D_corrected, r.support_tight_D, r.corrected_violations == 0);
  rep.info("continuous.norm_bound", "||S_k|| <= sqrt(DC)", r.norm_bound, r.norm_bound, true);

  LocallyFiniteChain chain;
  chain.n_max = cc.chain_n_max;
  chain.params.q = c.cfg.weight.q;
  chain.params.n_max = cc.chain_n_max;
  auto lf = locally_finite_report(chain, cc.g0_samples, derive_seed(c.cfg.seed, 89, 0));
  rep.check("continuous.chain_lambda", "lambda_i * lambda_j = lambda_{max(i,j)}", 0, lf.lambda_max_error,
            lf.lambda_ok);
  rep.check("continuous.chain_lower", "rho * rho >= p_1 rho", 0,
            static_cast<double>(lf.lower_bound_violations), lf.lower_bound_violations == 0);
  rep.check("continuous.chain_domination", "rho * delta_g0 <= (1/p_1 + [K_m0 : K_1]) rho * rho", 0,
            static_cast<double>(lf.violations), lf.violations == 0);
  double worst = 0;
  for (const auto& row : lf.rows) worst = std::max(worst, row.best / row.C_corrected);
  rep.info("continuous.chain_domination_corrected",
           "rho * delta_g0 <= (1/p_1 + 2^{m0-1} P_{<m0} / (P_{<=m0} p_m0)) rho * rho", 1, worst,
           lf.corrected_violations == 0);
  rep.info("continuous.chain_tail", "q^{n_max} missing from rho", 0, lf.tail, true);

  std::string csv = csv_row({"g0", "m0", "C_stated", "C_corrected", "best", "violations", "corrected_violations"});
  for (const auto& row : lf.rows)
    csv += csv_row({"\"" + row.g0 + "\"", std::to_string(row.m0), num(row.C_stated), num(row.C_corrected),
                    num(row.best), std::to_string(row.violations), std::to_string(row.corrected_violations)});
  rep.table("chain", csv);
}

}  // namespace

Report run_pipeline(const std::string& command, const ExperimentConfig& cfg) {
  Report rep;
  rep.command = command;
  rep.config_hash = fnv1a(cfg.canonical);
  rep.seed = cfg.seed;
  rep.group = cfg.group.name();
  Context ctx(cfg, rep);
  try {
    if (command == "weights") run_weights(ctx);
    else if (command == "norms") run_norms(ctx);
    else if (command == "jrt") run_jrt(ctx);
    else if (command == "tower") run_tower(ctx);
    else if (command == "build") run_build(ctx);
    else if (command == "support") run_support(ctx);
    else if (command == "orbit") run_orbit(ctx);
    else if (command == "feldman") run_feldman(ctx);
    else if (command == "continuous") run_continuous(ctx);
    else if (command == "all") {
      if (ctx.finitely_generated()) {
        run_weights(ctx);
        run_norms(ctx);
        run_jrt(ctx);
      }
      if (ctx.abelian()) {
        run_tower(ctx);
        run_build(ctx);
        run_support(ctx);
        run_orbit(ctx);
      }
      run_feldman(ctx);
      run_continuous(ctx);
    } else {
      throw ConfigError("unknown subcommand '" + command + "'");
    }
  } catch (const CapacityError& e) {
    throw ConfigError(std::string("capacity: ") + e.what());
  }
  return rep;
}

int run_and_write(const std::string& command, const ExperimentConfig& cfg, const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep = run_pipeline(command, cfg);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.write(out_dir);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace hypercyc::app
