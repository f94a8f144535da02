#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "krf/rng.hpp"
#include "krf/tensor.hpp"

namespace krf_test {

// Random tensor in [lo, hi); entries within `kink_margin` of zero are pushed
// away so finite differences of relu-like ops stay valid.
inline krf::Tensor random_tensor(std::vector<std::size_t> shape, krf::Rng& rng,
                                 double lo = -2.0, double hi = 2.0,
                                 double kink_margin = 0.0) {
  krf::Tensor t = krf::Tensor::uniform(std::move(shape), rng, lo, hi);
  if (kink_margin > 0.0) {
    for (double& x : t.data()) {
      if (std::abs(x) < kink_margin) x = x < 0.0 ? -kink_margin : kink_margin;
    }
  }
  return t;
}

inline std::string repo_path(const std::string& rel) {
  return std::string(KRF_SOURCE_DIR) + "/" + rel;
}

}  // namespace krf_test
