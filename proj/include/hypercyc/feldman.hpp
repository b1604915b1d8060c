#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace hypercyc {

// Circle rotation z -> z + alpha (mod 1) pushed into blocks u_n = 2^-n phi0(f^n z), n = 1..depth,
// phi0(z) = (cos 2 pi z, sin 2 pi z). The operator is (Tu)_n = 2 u_{n+1}.
struct FeldmanEmbedding {
  double alpha = 0.0;
  int depth = 30;

  std::vector<std::array<double, 2>> phi(double z) const;
  // T applied to a truncated vector; the last block has nothing to pull in and is dropped
  static std::vector<std::array<double, 2>> apply_T(const std::vector<std::array<double, 2>>& u);
  double rotate(double z) const;
};

struct FeldmanReport {
  double alpha = 0.0;
  int depth = 0;
  std::size_t points = 0;
  double max_error = 0.0;          // max |phi(fz)_n - (T phi(z))_n| over n <= depth
  double max_norm_sq_error = 0.0;  // against (1/3)(1 - 4^-depth)
  double predicted_norm_sq = 0.0;
  double tail = 0.0;             // 2^-depth sup ||phi0||
  bool pass = false;
};

FeldmanReport feldman_baseline(double alpha, int depth, std::size_t points, std::uint64_t seed,
                               double tol = 1e-12);

}  // namespace hypercyc
