#include "hypercyc/feldman.hpp"

#include <cmath>
#include <numbers>

#include "hypercyc/errors.hpp"
#include "hypercyc/random.hpp"

namespace hypercyc {

double FeldmanEmbedding::rotate(double z) const {
  double r = z + alpha;
  return r - std::floor(r);
}

std::vector<std::array<double, 2>> FeldmanEmbedding::phi(double z) const {
  std::vector<std::array<double, 2>> u;
  u.reserve(depth);
  for (int n = 1; n <= depth; ++n) {
    z = rotate(z);
    const double s = std::ldexp(1.0, -n);
    u.push_back({s * std::cos(2 * std::numbers::pi * z), s * std::sin(2 * std::numbers::pi * z)});
  }
  return u;
}

std::vector<std::array<double, 2>> FeldmanEmbedding::apply_T(
    const std::vector<std::array<double, 2>>& u) {
  std::vector<std::array<double, 2>> t;
  for (std::size_t n = 0; n + 1 < u.size(); ++n) t.push_back({2 * u[n + 1][0], 2 * u[n + 1][1]});
  return t;
}

FeldmanReport feldman_baseline(double alpha, int depth, std::size_t points, std::uint64_t seed,
                               double tol) {
  if (depth < 2 || depth > 1000) throw DomainError("depth must lie in [2, 1000]");
  FeldmanEmbedding emb{alpha, depth};
  FeldmanEmbedding deeper{alpha, depth + 1};  // T phi(z) on n <= depth needs block depth + 1
  FeldmanReport r;
  r.alpha = alpha;
  r.depth = depth;
  r.points = points;
  r.predicted_norm_sq = (1.0 - std::ldexp(1.0, -2 * depth)) / 3.0;
  r.tail = std::ldexp(1.0, -depth);
  for (std::size_t i = 0; i < points; ++i) {
    Rng rng(derive_seed(seed, 51, i));
    const double z = rng.uniform();
    auto pz = emb.phi(z);
    auto pfz = emb.phi(emb.rotate(z));
    auto tpz = FeldmanEmbedding::apply_T(deeper.phi(z));
    for (std::size_t n = 0; n < tpz.size(); ++n)
      for (int c = 0; c < 2; ++c) r.max_error = std::max(r.max_error, std::abs(pfz[n][c] - tpz[n][c]));
    double nsq = 0;
    for (const auto& b : pz) nsq += b[0] * b[0] + b[1] * b[1];
    r.max_norm_sq_error = std::max(r.max_norm_sq_error, std::abs(nsq - r.predicted_norm_sq));
  }
  r.pass = points > 0 && r.max_error < tol && r.max_norm_sq_error < 1e-12;
  return r;
}

}  // namespace hypercyc
