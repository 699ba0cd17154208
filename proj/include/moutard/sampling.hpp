#pragma once

#include <random>

namespace moutard {

// Uniform draw in (0, 1) built directly from the raw 32-bit output so the
// stream does not depend on the standard library's distribution details.
inline double unit_sample(std::mt19937& gen) {
  return (static_cast<double>(gen()) + 0.5) / 4294967296.0;
}

inline double sample_in(std::mt19937& gen, double lo, double hi) {
  return lo + (hi - lo) * unit_sample(gen);
}

}  // namespace moutard
