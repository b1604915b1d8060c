#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hypercyc/group.hpp"
#include "hypercyc/weighted_space.hpp"

namespace hypercyc {

// A ball descriptor: center coefficients j/2^level on the sorted B_level (one j per
// element, |j| <= 4^level) and radius 2^-radius_exp.
struct BallDescriptor {
  int level = 0;
  std::vector<std::int64_t> digits;
  std::uint64_t radius_exp = 0;
  friend bool operator==(const BallDescriptor&, const BallDescriptor&) = default;
};

std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t k);
std::uint64_t cantor_pair(std::uint64_t a, std::uint64_t b);

// 0, 1, -1, 2, -2, ...
std::int64_t zigzag_decode(std::uint64_t u);
std::uint64_t zigzag_encode(std::int64_t j);

class BallBasis {
 public:
  explicit BallBasis(const Group& G);

  BallDescriptor describe(std::uint64_t k) const;
  std::uint64_t index(const BallDescriptor& d) const;
  BallSpec ball(std::uint64_t k) const;
  BallSpec realize(const BallDescriptor& d) const;
  std::uint64_t center_count() const { return total_; }

 private:
  Group G_;
  std::vector<std::vector<Element>> balls_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

}  // namespace hypercyc
