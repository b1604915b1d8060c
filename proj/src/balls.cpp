#include "hypercyc/balls.hpp"

#include <cmath>

#include "hypercyc/errors.hpp"

namespace hypercyc {

std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t k) {
  auto w = static_cast<std::uint64_t>((std::sqrt(8.0L * k + 1) - 1) / 2);
  while (w * (w + 1) / 2 > k) --w;
  while ((w + 1) * (w + 2) / 2 <= k) ++w;
  std::uint64_t y = k - w * (w + 1) / 2;
  return {w - y, y};
}

std::uint64_t cantor_pair(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s * (s + 1) / 2 + b;
}

std::int64_t zigzag_decode(std::uint64_t u) {
  return u % 2 ? static_cast<std::int64_t>((u + 1) / 2) : -static_cast<std::int64_t>(u / 2);
}

std::uint64_t zigzag_encode(std::int64_t j) {
  return j > 0 ? static_cast<std::uint64_t>(2 * j - 1) : static_cast<std::uint64_t>(-2 * j);
}

BallBasis::BallBasis(const Group& G) : G_(G) {
  for (int m = 0;; ++m) {
    auto ball = G.ball(m);
    const unsigned __int128 base = 2 * (static_cast<unsigned __int128>(1) << (2 * m)) + 1;
    unsigned __int128 c = 1;
    bool overflow = false;
    for (std::size_t i = 0; i < ball.size() && !overflow; ++i) {
      c *= base;
      overflow = c > ~std::uint64_t{0};
    }
    if (overflow || total_ + c > ~std::uint64_t{0}) break;
    balls_.push_back(std::move(ball));
    counts_.push_back(static_cast<std::uint64_t>(c));
    total_ += static_cast<std::uint64_t>(c);
  }
}

BallDescriptor BallBasis::describe(std::uint64_t k) const {
  auto [a, r] = cantor_unpair(k);
  if (a >= total_) throw DomainError("ball index beyond enumerable centers");
  BallDescriptor d;
  d.radius_exp = r;
  while (a >= counts_[d.level]) a -= counts_[d.level++];
  const std::uint64_t base = 2 * (std::uint64_t{1} << (2 * d.level)) + 1;
  for (std::size_t i = 0; i < balls_[d.level].size(); ++i) {
    d.digits.push_back(zigzag_decode(a % base));
    a /= base;
  }
  return d;
}

std::uint64_t BallBasis::index(const BallDescriptor& d) const {
  if (d.level < 0 || static_cast<std::size_t>(d.level) >= balls_.size())
    throw DomainError("ball level beyond enumerable range");
  if (d.digits.size() != balls_[d.level].size()) throw DomainError("digit count mismatch");
  const std::uint64_t base = 2 * (std::uint64_t{1} << (2 * d.level)) + 1;
  std::uint64_t a = 0;
  for (std::size_t i = d.digits.size(); i-- > 0;) {
    auto u = zigzag_encode(d.digits[i]);
    if (u >= base) throw DomainError("center coefficient out of range");
    a = a * base + u;
  }
  for (int m = 0; m < d.level; ++m) a += counts_[m];
  return cantor_pair(a, d.radius_exp);
}

BallSpec BallBasis::realize(const BallDescriptor& d) const {
  BallSpec b;
  std::vector<Entry> es;
  const double scale = std::ldexp(1.0, -d.level);
  for (std::size_t i = 0; i < d.digits.size(); ++i)
    if (d.digits[i] != 0) es.push_back({balls_[d.level][i], static_cast<double>(d.digits[i]) * scale});
  b.center = WeightedVector::from_entries(std::move(es));
  b.radius = std::ldexp(1.0, -static_cast<int>(d.radius_exp));
  b.support_radius = d.level;
  return b;
}

BallSpec BallBasis::ball(std::uint64_t k) const { return realize(describe(k)); }

}  // namespace hypercyc
