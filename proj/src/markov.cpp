#include "hypercyc/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hypercyc/errors.hpp"
#include "hypercyc/random.hpp"

namespace hypercyc {

double Observable::bound() const {
  switch (kind) {
    case ObservableKind::Indicator: return 1.0;
    case ObservableKind::Cosine: return 1.0;
    case ObservableKind::Constant: return std::abs(value);
  }
  return 0.0;
}

double Observable::mean() const {
  switch (kind) {
    case ObservableKind::Indicator: return cylinder.measure();
    case ObservableKind::Cosine: return 0.0;
    case ObservableKind::Constant: return value;
  }
  return 0.0;
}

double Observable::eval(const DynamicalSystem& sys, const PointHandle& x) const {
  switch (kind) {
    case ObservableKind::Indicator: return sys.in(cylinder, x) ? 1.0 : 0.0;
    case ObservableKind::Cosine: return std::cos(2 * std::numbers::pi * sys.angle(x, coordinate));
    case ObservableKind::Constant: return value;
  }
  return 0.0;
}

std::string Observable::describe(const Group& G) const {
  switch (kind) {
    case ObservableKind::Indicator: return "indicator " + cylinder.format(G);
    case ObservableKind::Cosine: return "cos(2 pi x_" + std::to_string(coordinate) + ")";
    case ObservableKind::Constant: return "constant";
  }
  return "";
}

double markov_average(const DynamicalSystem& sys, const Observable& f, const SparseMeasure& rho_n,
                      const PointHandle& x) {
  double s = 0;
  for (const auto& a : rho_n.atoms()) s += a.mass * f.eval(sys, sys.act(a.element, x));
  return s;
}

double rotation_eigenvalue(const DynamicalSystem& sys, int i) {
  if (sys.kind() != SystemKind::Rotation) throw DomainError("eigenvalue needs a rotation system");
  const int d = sys.group().rank();
  return (1.0 + 2.0 * (d - 1) + 2.0 * std::cos(2 * std::numbers::pi * sys.alpha()[i])) / (2 * d + 1);
}

JrtReport jrt_convergence_report(const DynamicalSystem& sys, const Observable& f,
                                 const std::vector<SparseMeasure>& powers, std::size_t samples,
                                 std::uint64_t seed, double tolerance) {
  if (powers.empty()) throw DomainError("need at least rho^{*0}");
  if (samples < 2) throw DomainError("need at least two samples");
  const std::size_t nn = powers.size();
  JrtReport r;
  r.observable = f.describe(sys.group());
  r.mean = f.mean();
  r.bound = f.bound();
  r.samples = samples;
  r.seed = seed;
  r.tolerance = tolerance;
  r.aperiodicity_witness = nn > 1 ? powers[1].mass(sys.group().identity()) : 0.0;

  std::vector<double> vals(nn * samples);
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < samples; ++s) {
    auto x = sys.sample(derive_seed(seed, 21, s));
    for (std::size_t n = 0; n < nn; ++n) vals[n * samples + s] = markov_average(sys, f, powers[n], x);
  }

  const bool nonneg = f.kind == ObservableKind::Indicator ||
                      (f.kind == ObservableKind::Constant && f.value >= 0);
  std::vector<double> sq(samples);
  for (std::size_t n = 0; n < nn; ++n) {
    JrtRow row;
    row.n = static_cast<int>(n);
    for (std::size_t s = 0; s < samples; ++s) {
      double v = vals[n * samples + s];
      double dev = v - r.mean;
      sq[s] = dev * dev;
      row.sup_dev = std::max(row.sup_dev, std::abs(dev));
      if (std::abs(v) > r.bound * (1 + 1e-12)) r.contraction = false;
      if (nonneg && v < 0) r.positivity = false;
    }
    auto m = mean_estimate(sq);
    row.mean_sq_dev = m.mean;
    row.mean_sq_se = m.se;
    row.l2_dev = std::sqrt(m.mean);
    if (f.kind == ObservableKind::Indicator && f.cylinder.bits() == 1) {
      double s2 = 0;
      for (const auto& a : powers[n].atoms()) s2 += a.mass * a.mass;
      row.predicted_l2 = std::sqrt(s2) / 2;
    } else if (f.kind == ObservableKind::Cosine) {
      row.predicted_l2 = std::pow(std::abs(rotation_eigenvalue(sys, f.coordinate)), n) / std::sqrt(2.0);
    } else if (f.kind == ObservableKind::Constant) {
      row.predicted_l2 = 0.0;
    }
    row.ratio = n > 0 && r.rows.back().l2_dev > 0 ? row.l2_dev / r.rows.back().l2_dev : 0.0;
    r.rows.push_back(row);
  }

  r.trend = true;
  std::size_t best = 0;
  for (std::size_t n = 1; n < nn; ++n) {
    const auto& cur = r.rows[n];
    const auto& env = r.rows[best];
    if (cur.mean_sq_dev > env.mean_sq_dev + 3 * (cur.mean_sq_se + env.mean_sq_se) + 1e-15)
      r.trend = false;
    if (cur.mean_sq_dev < env.mean_sq_dev) best = n;
  }
  r.converged = r.rows.back().l2_dev <= tolerance;
  r.pass = r.contraction && r.positivity && r.trend && r.converged;
  return r;
}

}  // namespace hypercyc
