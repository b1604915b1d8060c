#include "hypercyc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hypercyc/errors.hpp"
#include "hypercyc/random.hpp"
#include "hypercyc/verify.hpp"
#include "json.hpp"

namespace hypercyc {

using json = nlohmann::ordered_json;

double compute_eta(int n, std::span<const LevelBudget> levels) {
  if (n < 1 || levels.size() < static_cast<std::size_t>(n))
    throw DomainError("eta needs a completed stage");
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const auto& b = levels[i];
    m = std::min({m, b.epsilon, b.beta, b.delta, b.gamma});
  }
  return m / (2.0 * n * (n + 1));
}

std::size_t ModelFunction::pre_count(int n) const {
  std::size_t prev = n == 1 ? 1 : stages_[n - 2].nodes.size();
  return prev + stages_[n - 1].born.size();
}

double ModelFunction::pre_value(int n, std::uint32_t p) const {
  std::size_t prev = n == 1 ? 1 : stages_[n - 2].nodes.size();
  if (p < prev) return n == 1 ? 0.0 : stages_[n - 2].nodes[p].value;
  return stages_[n - 1].born[p - prev].value;
}

const std::vector<std::uint8_t>& ModelFunction::pre_sides(int n, std::uint32_t p) const {
  static const std::vector<std::uint8_t> none;
  std::size_t prev = n == 1 ? 1 : stages_[n - 2].nodes.size();
  if (p < prev) return n == 1 ? none : stages_[n - 2].nodes[p].sides;
  return stages_[n - 1].born[p - prev].sides;
}

ModelFunction::Eval ModelFunction::eval(const DynamicalSystem& sys, const PointHandle& x,
                                        int upto) const {
  if (upto < 0 || upto > stage_count()) upto = stage_count();
  std::uint32_t p = 0;
  for (int j = 0; j < upto; ++j) {
    const auto& st = stages_[j];
    if (auto idx = st.tower.locate(sys, x)) p = st.patch_nodes[*idx];
    p = 2 * p + (sys.in(st.set, x) ? 0u : 1u);
  }
  if (upto == 0) return {0, 0.0};
  return {p, stages_[upto - 1].nodes[p].value};
}

double ModelFunction::max_abs(int upto) const {
  if (upto < 0 || upto > stage_count()) upto = stage_count();
  if (upto == 0) return 0.0;
  double m = 0;
  for (const auto& nd : stages_[upto - 1].nodes) m = std::max(m, std::abs(nd.value));
  return m;
}

std::vector<LevelBudget> ModelFunction::budgets(int upto) const {
  if (upto < 0 || upto > stage_count()) upto = stage_count();
  std::vector<LevelBudget> b;
  for (int j = 0; j < upto; ++j) b.push_back(stages_[j].budget);
  return b;
}

double certified_l4(const std::vector<StageRecord>& stages) {
  double total_s = 0;
  for (const auto& st : stages) total_s += st.split;
  double bound = std::pow(total_s, 4);
  double later = total_s;
  for (const auto& st : stages) {
    bound += st.tower.tower_measure * std::pow(st.patch_max + later, 4);
    later -= st.split;
  }
  return bound;
}

namespace {

struct PreNode {
  double value;
  std::vector<std::uint8_t> sides;
};

// min |a - b| over a with label 0 and b with label 1
double cross_gap(std::vector<std::pair<double, int>> vs) {
  std::sort(vs.begin(), vs.end());
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < vs.size(); ++i)
    if (vs[i].second != vs[i - 1].second) g = std::min(g, vs[i].first - vs[i - 1].first);
  return g;
}

double level_gap(const std::vector<ValueNode>& nodes, int level) {
  std::vector<std::pair<double, int>> vs;
  for (const auto& nd : nodes) vs.push_back({nd.value, nd.sides[level - 1]});
  return cross_gap(std::move(vs));
}

std::string history_json(const Group& G, const ModelConfig& cfg, const std::vector<StageRecord>& done) {
  return model_to_json(ModelFunction(G, cfg, done));
}

double weight_mass_ball(const WeightTable& w, const std::vector<Element>& ball) {
  double s = 0;
  for (const auto& g : ball) s += w.weight(g);
  return s;
}

void run_stage_checks(const ModelFunction& f, const DynamicalSystem& sys, const WeightTable& w,
                      int n) {
  const auto& stages = f.stages();
  const ModelConfig& cfg = f.config();
  StageRecord& st = const_cast<StageRecord&>(stages[n - 1]);
  StageChecks& ck = st.checks;
  ck.levels.assign(n, {});
  const double beta_n = st.budget.beta;

  for (int i = 1; i <= n; ++i) {
    auto& lc = ck.levels[i - 1];
    lc.level = i;
    lc.gap = level_gap(st.nodes, i);
    lc.required = stages[i - 1].budget.epsilon * (1.0 + 1.0 / n);
    lc.separated = lc.gap >= lc.required;
    lc.cover_gap = lc.gap - beta_n;
    lc.cover_required = stages[i - 1].budget.epsilon * (1.0 + 1.0 / (n + 1));
    lc.covers_separated = lc.cover_gap >= lc.cover_required;
  }

  ck.nested = true;
  ck.worst_nesting_slack = std::numeric_limits<double>::infinity();
  if (n >= 2) {
    const double beta_prev = stages[n - 2].budget.beta;
    for (const auto& nd : st.nodes) {
      double parent = f.pre_value(n, static_cast<std::uint32_t>(nd.parent));
      double slack = beta_prev / 2 - (std::abs(nd.value - parent) + beta_n / 2);
      ck.worst_nesting_slack = std::min(ck.worst_nesting_slack, slack);
      if (slack < 0) ck.nested = false;
    }
  }

  // hit_ball on draws from E_n
  const auto& tw = st.tower;
  const double mass_N = weight_mass_ball(w, tw.ball);
  const double tail_mass = 1.0 - mass_N + w.tail_bound();
  const double Mn = f.max_abs(n);
  ck.tail_contribution = st.max_pre * std::sqrt(tail_mass);
  const std::size_t V = cfg.verify_samples;
  std::vector<double> restricted(V), upper(V);
  std::vector<unsigned char> exact(V, 1);
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < V; ++s) {
    auto x = sys.sample_in(derive_seed(cfg.seed, 1000 + n, s), tw.base);
    double d2 = 0, maxd2 = 0;
    for (std::size_t gi = 0; gi < tw.ball.size(); ++gi) {
      auto y = sys.act(tw.ball[gi], x);
      auto loc = tw.locate(sys, y);
      double target = st.ball.center.coef(tw.ball[gi]);
      auto e = f.eval(sys, y, n);
      if (!loc || *loc != gi || (e.node >> 1) != st.patch_nodes[gi]) exact[s] = 0;
      double d = e.value - target;
      d2 += d * d * w.weight(tw.ball[gi]);
      maxd2 = std::max(maxd2, d * d);
    }
    restricted[s] = std::sqrt(d2);
    upper[s] = std::sqrt(d2 + maxd2 * w.tail_bound() + Mn * Mn * tail_mass);
  }
  ck.hit_samples = V;
  ck.hit_inside = 0;
  ck.exact_patch = true;
  ck.max_restricted_distance = ck.max_distance_upper = 0;
  for (std::size_t s = 0; s < V; ++s) {
    ck.max_restricted_distance = std::max(ck.max_restricted_distance, restricted[s]);
    ck.max_distance_upper = std::max(ck.max_distance_upper, upper[s]);
    ck.hit_inside += upper[s] < st.ball.radius && restricted[s] < st.ball.radius / 2;
    if (!exact[s]) ck.exact_patch = false;
  }

  // 4_n: E_i^{(n)} = {x in E_i : phi_{f_l}(x) in U_i for l = i..n}
  for (int i = 1; i <= n; ++i) {
    const auto& si = stages[i - 1];
    auto& lc = ck.levels[i - 1];
    const double mi = weight_mass_ball(w, si.tower.ball);
    std::vector<unsigned char> hit(V);
#pragma omp parallel for schedule(static)
    for (std::size_t s = 0; s < V; ++s) {
      auto x = sys.sample_in(derive_seed(cfg.seed, 2000 + 64 * n + i, s), si.tower.base);
      bool ok = true;
      for (int l = i; l <= n && ok; ++l) {
        auto p = phi(f, sys, w, x, si.tower.ball, mi, l);
        ok = phi_distance(p, si.ball.center, w).classify(si.ball.radius) == Membership::Inside;
      }
      hit[s] = ok;
    }
    lc.hit_trials = V;
    lc.hits = 0;
    for (auto h : hit) lc.hits += h;
    lc.hit_measure_lower = si.tower.base_measure * binomial_lower(lc.hits, V, cfg.confidence);
    lc.hit_required = si.budget.delta * (1.0 + 1.0 / n);
    lc.hits_ok = lc.hit_measure_lower >= lc.hit_required;
  }

  // 3_n and 5_n on unconditional draws
  const std::size_t S = cfg.check_samples;
  std::vector<double> f4(S);
  std::vector<std::uint32_t> exc(S * n, 0);
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < S; ++s) {
    auto x = sys.sample(derive_seed(cfg.seed, 3000 + n, s));
    auto e = f.eval(sys, x, n);
    f4[s] = std::pow(e.value, 4);
    const auto& sides = st.nodes[e.node].sides;
    for (int i = 1; i <= n; ++i) {
      int want = sys.in(stages[i - 1].set, x) ? 0 : 1;
      exc[s * n + (i - 1)] = sides[i - 1] != want;
    }
  }
  for (int i = 1; i <= n; ++i) {
    auto& lc = ck.levels[i - 1];
    lc.exception_trials = S;
    lc.exceptions = 0;
    for (std::size_t s = 0; s < S; ++s) lc.exceptions += exc[s * n + (i - 1)];
    lc.exception_budget = stages[i - 1].budget.gamma * (1.0 - 1.0 / n);
    lc.exception_upper = binomial_upper(lc.exceptions, S, cfg.confidence);
    lc.exception_certified = 0;
    for (int k = i + 1; k <= n; ++k) lc.exception_certified += stages[k - 1].tower.tower_measure;
    lc.exceptions_ok = lc.exception_budget == 0.0
                           ? lc.exceptions == 0 && lc.exception_certified == 0.0
                           : lc.exception_upper < lc.exception_budget;
  }
  auto m4 = mean_estimate(f4);
  ck.l4_mc = m4.mean;
  ck.l4_mc_se = m4.se;
  ck.l4_certified = certified_l4(std::vector<StageRecord>(stages.begin(), stages.begin() + n));
  ck.l4_ok = m4.mean + 3 * m4.se < 1.0 && ck.l4_certified < 1.0;

  ck.pass = ck.nested && ck.l4_ok && ck.exact_patch && ck.hit_inside == ck.hit_samples;
  for (const auto& lc : ck.levels)
    ck.pass = ck.pass && lc.separated && lc.covers_separated && lc.exceptions_ok && lc.hits_ok;
}

}  // namespace

ModelFunction build_model(const DynamicalSystem& sys, const WeightTable& w, const ModelConfig& cfg) {
  const Group& G = sys.group();
  if (cfg.stages < 1) throw DomainError("stages must be >= 1");
  if (sys.kind() != SystemKind::Bernoulli) throw DomainError("model building needs a Bernoulli system");
  BallBasis basis(G);
  SetFamily family(G);
  std::vector<StageRecord> done;

  auto fail = [&](const std::string& msg) {
    throw StageError(msg, history_json(G, cfg, done));
  };

  for (int n = 1; n <= cfg.stages; ++n) {
    StageRecord st;
    st.n = n;

    std::vector<PreNode> pre;
    if (n == 1) pre.push_back({0.0, {}});
    else
      for (const auto& nd : done.back().nodes) pre.push_back({nd.value, nd.sides});
    std::vector<LevelBudget> levels;
    for (const auto& d : done) levels.push_back(d.budget);

    st.eta = n == 1 ? cfg.eta0 : compute_eta(n - 1, levels);
    st.ball_index = cfg.ball_indices.size() >= static_cast<std::size_t>(n) ? cfg.ball_indices[n - 1]
                                                                          : static_cast<std::uint64_t>(n - 1);
    st.ball = basis.ball(st.ball_index);
    const int N0 = st.ball.support_radius;
    const double r = st.ball.radius;

    double max_pre = st.ball.center.max_abs();
    for (const auto& p : pre) max_pre = std::max(max_pre, std::abs(p.value));
    st.max_pre = max_pre;

    // smallest N > N0 with max|f^| sqrt(tail mass outside B_N) < r/2
    const int N_cap = w.support_radius();
    auto tail_of = [&](int N) { return 1.0 - weight_mass_ball(w, G.ball(N)) + w.tail_bound(); };
    auto ok = [&](int N) { return max_pre * std::sqrt(tail_of(N)) < r / 2; };
    int lo = N0, hi = N0 + 1;
    if (hi > N_cap) fail("stage " + std::to_string(n) + ": ball support exceeds the weight table");
    while (!ok(hi)) {
      if (hi >= N_cap)
        fail("stage " + std::to_string(n) + ": tail criterion needs N > " + std::to_string(N_cap) +
             " (raise Nmax)");
      lo = hi;
      hi = std::min(2 * hi, N_cap);
    }
    while (hi - lo > 1) {
      int mid = lo + (hi - lo) / 2;
      (ok(mid) ? hi : lo) = mid;
    }
    st.N = hi;
    st.tail_mass = tail_of(st.N);

    // patch: xi on B_N0, zero on the annulus, mapped onto pre-values
    const auto ballN = G.ball(st.N);
    const double snap_tol = n == 1 ? 0.0 : done.back().budget.beta / 2;
    auto nearest = [&](double t) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < pre.size(); ++i)
        if (std::abs(pre[i].value - t) < std::abs(pre[best].value - t)) best = i;
      return best;
    };
    for (const auto& g : ballN) {
      double t = G.word_length(g) <= N0 ? st.ball.center.coef(g) : 0.0;
      std::size_t near = nearest(t);
      if (pre[near].value == t) {
        st.patch_nodes.push_back(static_cast<std::uint32_t>(near));
        continue;
      }
      if (std::abs(pre[near].value - t) <= snap_tol) {
        st.patch_nodes.push_back(static_cast<std::uint32_t>(near));
        ++st.snapped;
        continue;
      }
      // a new value: pick a side per level keeping it clear of the opposite side
      std::vector<std::uint8_t> sides;
      bool feasible = true;
      for (int i = 1; i < n; ++i) {
        double d[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        for (const auto& p : pre) {
          // d[b]: distance to the side opposite b
          int other = p.sides[i - 1];
          d[1 - other] = std::min(d[1 - other], std::abs(p.value - t));
        }
        std::uint8_t b = d[0] >= d[1] ? 0 : 1;
        double need = levels[i - 1].epsilon * (1.0 + 1.0 / (n - 1)) + done.back().budget.beta;
        if (d[b] < need) feasible = false;
        sides.push_back(b);
      }
      if (!feasible) {
        st.patch_nodes.push_back(static_cast<std::uint32_t>(near));
        ++st.snapped;
        continue;
      }
      st.born.push_back({t, sides});
      pre.push_back({t, sides});
      st.patch_nodes.push_back(static_cast<std::uint32_t>(pre.size() - 1));
    }
    st.patch_max = 0;
    for (auto p : st.patch_nodes) st.patch_max = std::max(st.patch_max, std::abs(pre[p].value));

    // split offset
    double s = n == 1 ? cfg.eps1 : std::min(done.back().budget.beta / 8, st.eta / 2);
    {
      std::vector<double> vals;
      for (const auto& p : pre) vals.push_back(p.value);
      std::sort(vals.begin(), vals.end());
      for (std::size_t i = 1; i < vals.size(); ++i) s = std::min(s, (vals[i] - vals[i - 1]) / 4);
    }
    if (!(s > 0)) fail("stage " + std::to_string(n) + ": split offset vanished");
    st.split = s;

    // tower, shrunk until the L4 bound keeps room
    {
      std::vector<StageRecord> trial = done;
      trial.push_back(st);
      auto accept = [&](double tm) {
        trial.back().tower.tower_measure = tm;
        return certified_l4(trial) < 1.0;
      };
      TowerOptions opt;
      opt.accept = accept;
      opt.max_marker_bits = cfg.max_marker_bits;
      try {
        st.tower = rokhlin_tower(sys, st.N, st.eta, opt);
      } catch (const TowerError& e) {
        fail("stage " + std::to_string(n) + ": " + e.what());
      }
    }

    st.set_index = static_cast<std::uint64_t>(n);
    st.set = family.set(st.set_index);

    for (std::size_t p = 0; p < pre.size(); ++p)
      for (std::uint8_t b = 0; b < 2; ++b) {
        ValueNode nd;
        nd.value = b ? pre[p].value + s : pre[p].value - s;
        nd.parent = static_cast<std::int64_t>(p);
        nd.sides = pre[p].sides;
        nd.sides.push_back(b);
        st.nodes.push_back(std::move(nd));
      }

    // budgets for the new level
    std::vector<double> gaps(n + 1);
    for (int i = 1; i <= n; ++i) gaps[i] = level_gap(st.nodes, i);
    double eps = gaps[n] / (1.0 + 1.0 / n);
    while (eps * (1.0 + 1.0 / n) > gaps[n]) eps = std::nextafter(eps, 0.0);
    st.budget.epsilon = eps;

    double cand = std::numeric_limits<double>::infinity();
    std::ostringstream report;
    for (int i = 1; i <= n; ++i) {
      double ei = i == n ? eps : levels[i - 1].epsilon;
      double c = gaps[i] - ei * (1.0 + 1.0 / (n + 1));
      report << " level " << i << ": gap " << gaps[i] << " need > " << ei * (1.0 + 1.0 / (n + 1)) << ";";
      cand = std::min(cand, c);
    }
    if (n >= 2) cand = std::min(cand, done.back().budget.beta - 2 * s);
    if (!(cand > 0)) fail("stage " + std::to_string(n) + ": separation infeasible;" + report.str());
    st.budget.beta = n == 1 ? std::min(cfg.beta1, cand / 2) : cand / 2;
    st.budget.gamma = cfg.gamma1 * std::ldexp(1.0, -(n - 1));
    st.budget.delta =
        std::min(cfg.delta_fraction * st.tower.base_measure / (1.0 + 1.0 / n), cfg.delta_cap);

    done.push_back(std::move(st));
    ModelFunction f(G, cfg, done);
    run_stage_checks(f, sys, w, n);
    done.back().checks = f.stages()[n - 1].checks;
  }
  return ModelFunction(G, cfg, std::move(done));
}

HistoryAudit audit_history(const ModelFunction& f) {
  HistoryAudit a;
  const auto& st = f.stages();
  for (int n = 1; n <= f.stage_count(); ++n) {
    const auto& s = st[n - 1];
    if (s.nodes.size() != 2 * f.pre_count(n)) {
      a.range_doubles = false;
      a.failures.push_back("stage " + std::to_string(n) + ": node count");
    }
    for (int i = 1; i <= n; ++i) {
      double gap = level_gap(s.nodes, i);
      double eps = st[i - 1].budget.epsilon;
      if (!(gap >= eps * (1.0 + 1.0 / n))) {
        a.separated = false;
        a.failures.push_back("1_" + std::to_string(n) + " level " + std::to_string(i));
      }
      if (!(gap - s.budget.beta >= eps * (1.0 + 1.0 / (n + 1)))) {
        a.covers_separated = false;
        a.failures.push_back("2_" + std::to_string(n) + " level " + std::to_string(i));
      }
    }
    if (n >= 2)
      for (const auto& nd : s.nodes) {
        double parent = f.pre_value(n, static_cast<std::uint32_t>(nd.parent));
        if (std::abs(nd.value - parent) + s.budget.beta / 2 > st[n - 2].budget.beta / 2) {
          a.nested = false;
          a.failures.push_back("nesting at stage " + std::to_string(n));
          break;
        }
      }
  }
  return a;
}

namespace {

json cylinder_json(const Group& G, const Cylinder& c) {
  json a = json::array();
  for (const auto& [p, b] : c.conds()) a.push_back(json::array({G.format(p), b}));
  return a;
}

Cylinder cylinder_from(const Group& G, const json& a) {
  std::vector<Cylinder::Cond> conds;
  for (const auto& e : a) conds.push_back({G.parse(e.at(0).get<std::string>()), e.at(1).get<int>()});
  auto c = Cylinder::make(std::move(conds));
  if (!c) throw DomainError("contradictory cylinder in model file");
  return *c;
}

json budget_json(const LevelBudget& b) {
  return json{{"epsilon", b.epsilon}, {"beta", b.beta}, {"delta", b.delta}, {"gamma", b.gamma}};
}

json checks_json(const StageChecks& c) {
  json lv = json::array();
  for (const auto& l : c.levels)
    lv.push_back(json{{"level", l.level},
                      {"gap", l.gap},
                      {"required", l.required},
                      {"cover_gap", l.cover_gap},
                      {"cover_required", l.cover_required},
                      {"separated", l.separated},
                      {"covers_separated", l.covers_separated},
                      {"exceptions", l.exceptions},
                      {"exception_trials", l.exception_trials},
                      {"exception_budget", l.exception_budget},
                      {"exception_upper", l.exception_upper},
                      {"exception_certified", l.exception_certified},
                      {"exceptions_ok", l.exceptions_ok},
                      {"hits", l.hits},
                      {"hit_trials", l.hit_trials},
                      {"hit_measure_lower", l.hit_measure_lower},
                      {"hit_required", l.hit_required},
                      {"hits_ok", l.hits_ok}});
  return json{{"levels", lv},
              {"nested", c.nested},
              {"worst_nesting_slack", std::isfinite(c.worst_nesting_slack) ? json(c.worst_nesting_slack) : json(nullptr)},
              {"tail_contribution", c.tail_contribution},
              {"hit_samples", c.hit_samples},
              {"hit_inside", c.hit_inside},
              {"max_restricted_distance", c.max_restricted_distance},
              {"max_distance_upper", c.max_distance_upper},
              {"exact_patch", c.exact_patch},
              {"l4_mc", c.l4_mc},
              {"l4_mc_se", c.l4_mc_se},
              {"l4_certified", c.l4_certified},
              {"l4_ok", c.l4_ok},
              {"pass", c.pass}};
}

StageChecks checks_from(const json& j) {
  StageChecks c;
  for (const auto& l : j.at("levels")) {
    LevelCheck x;
    x.level = l.at("level");
    x.gap = l.at("gap");
    x.required = l.at("required");
    x.cover_gap = l.at("cover_gap");
    x.cover_required = l.at("cover_required");
    x.separated = l.at("separated");
    x.covers_separated = l.at("covers_separated");
    x.exceptions = l.at("exceptions");
    x.exception_trials = l.at("exception_trials");
    x.exception_budget = l.at("exception_budget");
    x.exception_upper = l.at("exception_upper");
    x.exception_certified = l.at("exception_certified");
    x.exceptions_ok = l.at("exceptions_ok");
    x.hits = l.at("hits");
    x.hit_trials = l.at("hit_trials");
    x.hit_measure_lower = l.at("hit_measure_lower");
    x.hit_required = l.at("hit_required");
    x.hits_ok = l.at("hits_ok");
    c.levels.push_back(x);
  }
  c.nested = j.at("nested");
  const auto& slack = j.at("worst_nesting_slack");
  c.worst_nesting_slack = slack.is_null() ? std::numeric_limits<double>::infinity() : slack.get<double>();
  c.tail_contribution = j.at("tail_contribution");
  c.hit_samples = j.at("hit_samples");
  c.hit_inside = j.at("hit_inside");
  c.max_restricted_distance = j.at("max_restricted_distance");
  c.max_distance_upper = j.at("max_distance_upper");
  c.exact_patch = j.at("exact_patch");
  c.l4_mc = j.at("l4_mc");
  c.l4_mc_se = j.at("l4_mc_se");
  c.l4_certified = j.at("l4_certified");
  c.l4_ok = j.at("l4_ok");
  c.pass = j.at("pass");
  return c;
}

}  // namespace

std::string model_to_json(const ModelFunction& f) {
  const Group& G = f.group();
  const auto& cfg = f.config();
  json j;
  j["group"] = G.spec().name();
  j["config"] = json{{"stages", cfg.stages},       {"eps1", cfg.eps1},
                     {"gamma1", cfg.gamma1},       {"beta1", cfg.beta1},
                     {"delta_cap", cfg.delta_cap}, {"delta_fraction", cfg.delta_fraction},
                     {"eta0", cfg.eta0},           {"ball_indices", cfg.ball_indices},
                     {"verify_samples", cfg.verify_samples},
                     {"check_samples", cfg.check_samples},
                     {"confidence", cfg.confidence},
                     {"seed", cfg.seed},
                     {"max_marker_bits", cfg.max_marker_bits}};
  json stages = json::array();
  for (const auto& st : f.stages()) {
    json center = json::array();
    for (const auto& e : st.ball.center.entries()) center.push_back(json::array({G.format(e.element), e.coef}));
    json born = json::array();
    for (const auto& b : st.born) born.push_back(json{{"value", b.value}, {"sides", b.sides}});
    json nodes = json::array();
    for (const auto& nd : st.nodes)
      nodes.push_back(json{{"value", nd.value}, {"parent", nd.parent}, {"sides", nd.sides}});
    stages.push_back(json{
        {"n", st.n},
        {"ball_index", st.ball_index},
        {"ball", json{{"center", center}, {"radius", st.ball.radius}, {"N0", st.ball.support_radius}}},
        {"eta", st.eta},
        {"N", st.N},
        {"tail_mass", st.tail_mass},
        {"max_pre", st.max_pre},
        {"tower", json{{"kind", st.tower.kind},
                       {"N", st.tower.N},
                       {"marker", st.tower.marker},
                       {"eta", st.tower.eta},
                       {"base", cylinder_json(G, st.tower.base)},
                       {"base_measure", st.tower.base_measure},
                       {"tower_measure", st.tower.tower_measure}}},
        {"patch_nodes", st.patch_nodes},
        {"born", born},
        {"snapped", st.snapped},
        {"patch_max", st.patch_max},
        {"set_index", st.set_index},
        {"set", cylinder_json(G, st.set)},
        {"split", st.split},
        {"nodes", nodes},
        {"budget", budget_json(st.budget)},
        {"checks", checks_json(st.checks)}});
  }
  j["stages"] = stages;
  return j.dump(2);
}

ModelFunction model_from_json(const std::string& s, const DynamicalSystem& sys) {
  const Group& G = sys.group();
  json j = json::parse(s);
  if (j.at("group").get<std::string>() != G.spec().name())
    throw DomainError("model was built for " + j.at("group").get<std::string>());
  ModelConfig cfg;
  const auto& c = j.at("config");
  cfg.stages = c.at("stages");
  cfg.eps1 = c.at("eps1");
  cfg.gamma1 = c.at("gamma1");
  cfg.beta1 = c.at("beta1");
  cfg.delta_cap = c.at("delta_cap");
  cfg.delta_fraction = c.at("delta_fraction");
  cfg.eta0 = c.at("eta0");
  cfg.ball_indices = c.at("ball_indices").get<std::vector<std::uint64_t>>();
  cfg.verify_samples = c.at("verify_samples");
  cfg.check_samples = c.at("check_samples");
  cfg.confidence = c.at("confidence");
  cfg.seed = c.at("seed");
  cfg.max_marker_bits = c.at("max_marker_bits");

  std::vector<StageRecord> stages;
  for (const auto& js : j.at("stages")) {
    StageRecord st;
    st.n = js.at("n");
    st.ball_index = js.at("ball_index");
    std::vector<Entry> es;
    for (const auto& e : js.at("ball").at("center"))
      es.push_back({G.parse(e.at(0).get<std::string>()), e.at(1).get<double>()});
    st.ball.center = WeightedVector::from_entries(std::move(es));
    st.ball.radius = js.at("ball").at("radius");
    st.ball.support_radius = js.at("ball").at("N0");
    st.eta = js.at("eta");
    st.N = js.at("N");
    st.tail_mass = js.at("tail_mass");
    st.max_pre = js.at("max_pre");
    const auto& jt = js.at("tower");
    st.tower.kind = jt.at("kind");
    st.tower.N = jt.at("N");
    st.tower.marker = jt.at("marker");
    st.tower.eta = jt.at("eta");
    st.tower.base = cylinder_from(G, jt.at("base"));
    st.tower.base_measure = jt.at("base_measure");
    st.tower.tower_measure = jt.at("tower_measure");
    st.tower.ball = G.ball(st.tower.N);
    for (const auto& g : st.tower.ball) st.tower.translates.push_back(st.tower.base.translated(G, g));
    st.tower.exact_disjoint = true;
    st.patch_nodes = js.at("patch_nodes").get<std::vector<std::uint32_t>>();
    for (const auto& b : js.at("born"))
      st.born.push_back({b.at("value").get<double>(), b.at("sides").get<std::vector<std::uint8_t>>()});
    st.snapped = js.at("snapped");
    st.patch_max = js.at("patch_max");
    st.set_index = js.at("set_index");
    st.set = cylinder_from(G, js.at("set"));
    st.split = js.at("split");
    for (const auto& nd : js.at("nodes"))
      st.nodes.push_back({nd.at("value").get<double>(), nd.at("parent").get<std::int64_t>(),
                          nd.at("sides").get<std::vector<std::uint8_t>>()});
    const auto& b = js.at("budget");
    st.budget = {b.at("epsilon"), b.at("beta"), b.at("delta"), b.at("gamma")};
    if (auto it = js.find("checks"); it != js.end()) st.checks = checks_from(*it);
    if (st.patch_nodes.size() != st.tower.ball.size()) throw DomainError("patch size mismatch in model file");
    stages.push_back(std::move(st));
  }
  return ModelFunction(G, cfg, std::move(stages));
}

}  // namespace hypercyc
