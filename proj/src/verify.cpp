#include "hypercyc/verify.hpp"

#include <algorithm>
#include <cmath>

#include "hypercyc/errors.hpp"
#include "hypercyc/random.hpp"

namespace hypercyc {

double ball_mass(const WeightTable& w, const std::vector<Element>& ball) {
  double s = 0;
  for (const auto& g : ball) s += w.weight(g);
  return s;
}

PhiResult phi(const ModelFunction& f, const DynamicalSystem& sys, const WeightTable& w,
              const PointHandle& x, const std::vector<Element>& ball, double mass, int upto) {
  std::vector<Entry> es;
  es.reserve(ball.size());
  for (const auto& g : ball) es.push_back({g, f(sys, sys.act(g, x), upto)});
  PhiResult r;
  r.v = WeightedVector::from_entries(std::move(es));
  r.tail = f.max_abs(upto) * std::sqrt(std::max(0.0, 1.0 - mass) + w.tail_bound());
  r.N = ball.empty() ? 0 : sys.group().word_length(ball.back());
  return r;
}

PhiResult phi(const ModelFunction& f, const DynamicalSystem& sys, const WeightTable& w,
              const PointHandle& x, int N_trunc, int upto) {
  auto ball = sys.group().ball(N_trunc);
  auto r = phi(f, sys, w, x, ball, ball_mass(w, ball), upto);
  r.N = N_trunc;
  return r;
}

DistanceBound phi_distance(const PhiResult& p, const WeightedVector& center, const WeightTable& w) {
  // outside B_N the center vanishes, so the two parts add in square
  return distance_bound(p.v, center, w, p.tail * p.tail);
}

EquivarianceReport equivariance_check(const ModelFunction& f, const DynamicalSystem& sys,
                                      const WeightTable& w, std::size_t samples,
                                      const std::vector<Element>& hs, int N_trunc,
                                      std::uint64_t seed) {
  const Group& G = sys.group();
  EquivarianceReport r;
  r.N_trunc = N_trunc;
  r.samples = samples;
  const auto ball = G.ball(N_trunc);
  const double mass = ball_mass(w, ball);
  for (const auto& h : hs) {
    r.elements.push_back(G.format(h));
    const int inner_r = N_trunc - G.word_length(h);
    if (inner_r < 0) throw DomainError("shift longer than the truncation radius");
    const auto inner_ball = G.ball(inner_r);
    std::vector<std::size_t> mism(samples, 0);
    std::vector<double> tails(samples, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t s = 0; s < samples; ++s) {
      auto x = sys.sample(derive_seed(seed, 31, s));
      auto px = phi(f, sys, w, x, ball, mass);
      auto phx = phi(f, sys, w, sys.act(h, x), ball, mass);
      auto shifted = shift(G, px.v, h);
      for (const auto& g : inner_ball)
        if (shifted.coef(g) != phx.v.coef(g)) ++mism[s];
      tails[s] = phx.tail;
    }
    r.compared += samples * inner_ball.size();
    for (std::size_t s = 0; s < samples; ++s) {
      r.mismatches += mism[s];
      r.max_tail = std::max(r.max_tail, tails[s]);
    }
  }
  r.pass = r.mismatches == 0 && r.compared > 0;
  return r;
}

namespace {

double side_gap(const std::vector<ValueNode>& nodes, int level) {
  std::vector<std::pair<double, int>> vs;
  for (const auto& nd : nodes) vs.push_back({nd.value, nd.sides[level - 1]});
  std::sort(vs.begin(), vs.end());
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < vs.size(); ++i)
    if (vs[i].second != vs[i - 1].second) g = std::min(g, vs[i].first - vs[i - 1].first);
  return g;
}

}  // namespace

SupportReport support_and_iso_check(const ModelFunction& f, const DynamicalSystem& sys,
                                    const WeightTable& w, std::size_t samples,
                                    std::size_t base_samples, int N_trunc, std::uint64_t seed,
                                    double confidence) {
  const Group& G = sys.group();
  const auto& stages = f.stages();
  const int K = f.stage_count();
  SupportReport rep;
  rep.N_trunc = N_trunc;
  rep.pass = K > 0;
  const auto ball = G.ball(N_trunc);
  const double mass = ball_mass(w, ball);

  // unconditional draws are shared by every level
  std::vector<PointHandle> xs(samples);
  std::vector<std::uint32_t> node(samples);
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < samples; ++s) {
    xs[s] = sys.sample(derive_seed(seed, 41, s));
    node[s] = f.eval(sys, xs[s]).node;
  }
  const auto& final_nodes = stages.back().nodes;

  for (int i = 1; i <= K; ++i) {
    const auto& si = stages[i - 1];
    if (si.ball.support_radius > N_trunc) throw DomainError("ball center exceeds the truncation radius");
    SupportRow row;
    row.level = i;
    row.delta = si.budget.delta;
    row.gamma = si.budget.gamma;
    row.base_measure = si.tower.base_measure;

    auto classify = [&](const PointHandle& x) {
      return phi_distance(phi(f, sys, w, x, ball, mass), si.ball.center, w).classify(si.ball.radius);
    };

    std::vector<Membership> in_base(base_samples);
#pragma omp parallel for schedule(static)
    for (std::size_t s = 0; s < base_samples; ++s)
      in_base[s] = classify(sys.sample_in(derive_seed(seed, 42 + 16 * i, s), si.tower.base));
    row.base_trials = base_samples;
    for (auto m : in_base) {
      row.hits_in_base += m == Membership::Inside;
      row.indeterminate += m == Membership::Indeterminate;
    }

    std::vector<int> outside(samples, -1);  // -1 for draws inside E_i
#pragma omp parallel for schedule(static)
    for (std::size_t s = 0; s < samples; ++s) {
      if (sys.in(si.tower.base, xs[s])) continue;
      auto m = classify(xs[s]);
      outside[s] = m == Membership::Inside ? 1 : m == Membership::Indeterminate ? 2 : 0;
    }
    for (int o : outside) {
      if (o < 0) continue;
      ++row.outside_trials;
      row.hits_outside += o == 1;
      row.indeterminate += o == 2;
    }

    const double mE = si.tower.base_measure;
    const double p_in = base_samples ? double(row.hits_in_base) / base_samples : 0.0;
    const double p_out = row.outside_trials ? double(row.hits_outside) / row.outside_trials : 0.0;
    row.hit_estimate = mE * p_in + (1 - mE) * p_out;
    row.hit_lower = (base_samples ? mE * binomial_lower(row.hits_in_base, base_samples, confidence) : 0.0) +
                    (row.outside_trials
                         ? (1 - mE) * binomial_lower(row.hits_outside, row.outside_trials, confidence)
                         : 0.0);
    row.hit_ok = row.hit_lower >= row.delta;

    row.symdiff_trials = samples;
    for (std::size_t s = 0; s < samples; ++s) {
      int want = sys.in(si.set, xs[s]) ? 0 : 1;
      row.symdiff += final_nodes[node[s]].sides[i - 1] != want;
    }
    row.symdiff_upper = binomial_upper(row.symdiff, samples, confidence);
    row.symdiff_ok = row.symdiff_upper < row.gamma;

    row.covers_disjoint = true;
    for (int m = i; m <= K; ++m)
      if (!(side_gap(stages[m - 1].nodes, i) > stages[m - 1].budget.beta)) row.covers_disjoint = false;

    rep.pass = rep.pass && row.hit_ok && row.symdiff_ok && row.covers_disjoint;
    rep.rows.push_back(row);
  }
  return rep;
}

namespace {

void finish_frequency(OrbitFrequency& o, const std::vector<unsigned char>& ind, double confidence) {
  o.steps = ind.size();
  if (o.steps == 0) return;
  o.frequency = double(o.inside) / o.steps;
  const std::size_t B = std::min<std::size_t>(20, o.steps);
  std::vector<double> means;
  for (std::size_t b = 0; b < B; ++b) {
    std::size_t lo = b * o.steps / B, hi = (b + 1) * o.steps / B;
    double s = 0;
    for (std::size_t k = lo; k < hi; ++k) s += ind[k];
    means.push_back(s / (hi - lo));
  }
  auto m = mean_estimate(means);
  auto ci = m.ci(normal_quantile(0.5 + confidence / 2));
  const double indet = double(o.indeterminate) / o.steps;
  o.ci = {std::max(0.0, std::min(ci.lo, o.frequency)), std::min(1.0, std::max(ci.hi, o.frequency) + indet)};
}

}  // namespace

OrbitFrequency orbit_frequency(const Group& G, const WeightedVector& v, double tail,
                               const Element& a, const BallSpec& U, std::size_t steps,
                               const WeightTable& w, double confidence) {
  OrbitFrequency o;
  const double growth = std::pow(std::sqrt((2 * G.rank() + 1) * w.params().C()), G.word_length(a));
  std::vector<unsigned char> ind;
  WeightedVector cur = v;
  double t = tail;
  for (std::size_t n = 1; n <= steps; ++n) {
    cur = shift(G, cur, a);
    t *= growth;
    auto d = distance_bound(cur, U.center, w, 0.0);
    DistanceBound wide{std::max(0.0, d.lo - t), d.hi + t};
    auto m = wide.classify(U.radius);
    o.inside += m == Membership::Inside;
    o.outside += m == Membership::Outside;
    o.indeterminate += m == Membership::Indeterminate;
    ind.push_back(m == Membership::Inside);
    o.running.push_back(double(o.inside) / n);
  }
  o.final_tail = t;
  finish_frequency(o, ind, confidence);
  return o;
}

OrbitFrequency model_orbit_frequency(const ModelFunction& f, const DynamicalSystem& sys,
                                     const WeightTable& w, const PointHandle& x,
                                     const Element& a, const BallSpec& U, std::size_t steps,
                                     int N_trunc, double confidence) {
  const Group& G = sys.group();
  const auto ball = G.ball(N_trunc);
  const double mass = ball_mass(w, ball);
  std::vector<Membership> ms(steps);
#pragma omp parallel for schedule(static)
  for (std::size_t n = 1; n <= steps; ++n) {
    auto xn = sys.act(G.power(a, static_cast<std::int64_t>(n)), x);
    ms[n - 1] = phi_distance(phi(f, sys, w, xn, ball, mass), U.center, w).classify(U.radius);
  }
  OrbitFrequency o;
  std::vector<unsigned char> ind;
  for (std::size_t n = 0; n < steps; ++n) {
    o.inside += ms[n] == Membership::Inside;
    o.outside += ms[n] == Membership::Outside;
    o.indeterminate += ms[n] == Membership::Indeterminate;
    ind.push_back(ms[n] == Membership::Inside);
    o.running.push_back(double(o.inside) / (n + 1));
  }
  o.final_tail = f.max_abs() * std::sqrt(std::max(0.0, 1.0 - mass) + w.tail_bound());
  finish_frequency(o, ind, confidence);
  return o;
}

}  // namespace hypercyc
