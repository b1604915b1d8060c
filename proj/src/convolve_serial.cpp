#include <map>

#include "hypercyc/errors.hpp"
#include "hypercyc/measure.hpp"

namespace hypercyc::serial {

// reference kernel: ordered map, contributions accumulated in (left, right) order
SparseMeasure convolve(const Group& G, const SparseMeasure& mu, const SparseMeasure& nu,
                       std::size_t cap) {
  std::map<Element, double> acc;
  for (const auto& l : mu.atoms())
    for (const auto& r : nu.atoms()) {
      auto [it, fresh] = acc.try_emplace(G.mul_unchecked(l.element, r.element), 0.0);
      it->second = fresh ? l.mass * r.mass : it->second + l.mass * r.mass;
    }
  if (acc.size() > cap) throw CapacityError("convolution support exceeds cap");
  std::vector<Atom> atoms;
  atoms.reserve(acc.size());
  for (auto& [g, m] : acc)
    if (m > 0) atoms.push_back({g, m});
  return SparseMeasure::from_sorted(std::move(atoms));
}

}  // namespace hypercyc::serial
