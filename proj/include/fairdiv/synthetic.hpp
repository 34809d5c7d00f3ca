#pragma once

#include <cstdint>

#include "fairdiv/core.hpp"

namespace fairdiv {

struct SyntheticConfig {
  std::size_t n = 100;
  std::size_t m = 2;
  std::size_t dim = 2;       // 0 selects matrix mode
  std::size_t clusters = 4;  // blob count (ignored in matrix mode)
  double spread = 1.0;       // blob standard deviation
  double extent = 100.0;     // blob centres drawn from [0, extent]^dim
  double edge_prob = 0.2;    // extra edges in matrix mode
  std::uint64_t seed = 1;
};

/// Deterministic for a fixed config. Point i gets group i mod m, so every
/// group is nonempty when n >= m. Euclidean mode draws Gaussian blobs; matrix
/// mode takes shortest-path distances on a random connected weighted graph.
Dataset generate_synthetic(const SyntheticConfig& config);

}  // namespace fairdiv
