#pragma once

#include <cstdint>
#include <random>

namespace hypercyc {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

// seed for trial i of a stream; independent of the thread that runs it
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t i) {
  return mix64(mix64(seed, stream), i);
}

inline double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// mt19937_64 with explicit conversions so results do not depend on the
// standard library's distribution implementations
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }
  double uniform() { return to_unit(eng_()); }
  // uniform on [lo, hi]
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(eng_());
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range);
    std::uint64_t r;
    do r = eng_(); while (r >= limit);
    return lo + static_cast<std::int64_t>(r % range);
  }
  bool coin() { return (eng_() >> 63) != 0; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace hypercyc
