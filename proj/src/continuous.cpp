#include "hypercyc/continuous.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "hypercyc/errors.hpp"

namespace hypercyc {

double overlap_density(const IntervalMeasure& L, double t) {
  return std::max(0.0, 2 * L.ell - std::abs(t));
}

double piecewise_integral(const std::function<double(double)>& f, double a, double b,
                          std::size_t scan) {
  if (!(b > a)) return 0.0;
  const double jump_tol = 1e-9;
  std::vector<double> cuts{a};
  for (std::size_t i = 0; i < scan; ++i) {
    double l = a + (b - a) * i / scan, r = a + (b - a) * (i + 1) / scan;
    double fl = f(l), fr = f(r);
    if (std::abs(fl - fr) <= jump_tol) continue;
    // follow the larger half; a jump keeps its size, smooth variation dies out
    for (int it = 0; it < 80 && r - l > 1e-15 * std::max(1.0, std::abs(l)); ++it) {
      double m = 0.5 * (l + r), fm = f(m);
      if (std::abs(fm - fl) >= std::abs(fr - fm)) r = m, fr = fm;
      else l = m, fl = fm;
    }
    if (std::abs(fl - fr) > jump_tol) cuts.push_back(0.5 * (l + r));
  }
  cuts.push_back(b);
  double s = 0;
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (cuts[i] > cuts[i - 1])
      s += boost::math::quadrature::gauss<double, 20>::integrate(f, cuts[i - 1], cuts[i]);
  return s;
}

double overlap_quadrature(const IntervalMeasure& L, double t) {
  auto ind = [&](double h) { return std::abs(t - h) <= L.ell && std::abs(h) <= L.ell ? 1.0 : 0.0; };
  return piecewise_integral(ind, -L.ell, L.ell);
}

namespace {

std::vector<double> grid(double lo, double hi, double step) {
  auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = i == n ? hi : lo + (hi - lo) * i / n;
  return g;
}

}  // namespace

RealDominationReport domination_constant_real(double k, double ell, double grid_step,
                                              std::size_t quad_points, double C) {
  if (!(k > 0 && ell > k)) throw DomainError("need 0 < k < ell");
  if (!(grid_step > 0)) throw DomainError("grid step must be positive");
  IntervalMeasure L{ell};
  RealDominationReport r;
  r.k = k;
  r.ell = ell;
  r.grid_step = grid_step;
  r.C = C;

  r.quad_points = quad_points;
  const double span = 2 * ell + 1;
  std::vector<double> qerr(quad_points);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < quad_points; ++i) {
    double t = quad_points > 1 ? -span + 2 * span * i / (quad_points - 1) : 0.0;
    qerr[i] = std::abs(overlap_quadrature(L, t) - overlap_density(L, t));
  }
  for (double e : qerr) r.quad_max_error = std::max(r.quad_max_error, e);

  r.u_closed = overlap_density(L, k + ell);
  r.u_grid = std::numeric_limits<double>::infinity();
  for (double t : grid(-(k + ell), k + ell, grid_step)) r.u_grid = std::min(r.u_grid, overlap_density(L, t));
  r.D = 2.0 / std::min(r.u_grid, r.u_closed);
  r.norm_bound = std::sqrt(r.D * C);
  r.support_D_corrected = 2 * L.length() / std::min(r.u_grid, r.u_closed);

  const double lam = L.length();
  auto lhs = [&](double s, double t) { return L.density(t - s); };           // rho * delta_s
  auto rr = [&](double t) { return overlap_density(L, t) / (lam * lam); };   // rho * rho
  const double slack = 1 + 1e-12;
  r.shifts = {-k, 0.0, k};
  for (double s : r.shifts) {
    for (double t : grid(-ell, ell, grid_step)) {
      ++r.window_points;
      r.window_violations += lhs(s, t) > r.D * rr(t) * slack;
    }
    for (double t : grid(s - ell, s + ell, grid_step)) {
      ++r.support_points;
      double a = lhs(s, t), b = rr(t);
      if (a > 0) r.support_tight_D = std::max(r.support_tight_D, a / b);
      r.support_violations += a > r.D * b * slack;
      r.corrected_violations += a > r.support_D_corrected * b * slack;
    }
  }
  r.pass = r.quad_max_error < 1e-6 && std::abs(r.u_grid - r.u_closed) < 1e-12 &&
           r.window_violations == 0 && r.corrected_violations == 0;
  return r;
}

}  // namespace hypercyc
