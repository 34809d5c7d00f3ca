#include "fairdiv/synthetic.hpp"

#include <algorithm>

#include "fairdiv/random.hpp"

namespace fairdiv {

namespace {

std::vector<std::string> default_labels(std::size_t m) {
  std::vector<std::string> labels;
  for (std::size_t g = 0; g < m; ++g) labels.push_back(std::to_string(g + 1));
  return labels;
}

Dataset blobs(const SyntheticConfig& c) {
  Rng rng(derive_seed(c.seed, "synthetic-blobs"));
  const std::size_t nc = std::max<std::size_t>(1, c.clusters);
  std::vector<std::vector<double>> centres(nc, std::vector<double>(c.dim));
  for (auto& centre : centres) {
    for (double& v : centre) v = rng.uniform() * c.extent;
  }
  std::vector<Point> pts;
  pts.reserve(c.n);
  for (std::size_t i = 0; i < c.n; ++i) {
    const auto& centre = centres[rng.below(nc)];
    std::vector<double> x(c.dim);
    for (std::size_t d = 0; d < c.dim; ++d) x[d] = centre[d] + c.spread * rng.normal();
    pts.push_back({"p" + std::to_string(i + 1), i % c.m, std::move(x)});
  }
  return Dataset::euclidean(std::move(pts), default_labels(c.m));
}

Dataset graph_metric(const SyntheticConfig& c) {
  Rng rng(derive_seed(c.seed, "synthetic-graph"));
  const std::size_t n = c.n;
  std::vector<double> d(n * n, kUnbounded);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
  auto edge = [&](std::size_t a, std::size_t b) {
    const double w = 1.0 + 9.0 * rng.uniform();
    d[a * n + b] = std::min(d[a * n + b], w);
    d[b * n + a] = d[a * n + b];
  };
  // A random tree keeps the graph connected; extra edges add variety.
  for (std::size_t i = 1; i < n; ++i) edge(i, rng.below(i));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < c.edge_prob) edge(i, j);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double ik = d[i * n + k];
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::min(d[i * n + j], ik + d[k * n + j]);
    }
  }
  // Closure arithmetic can differ in the last bit between (i,j) and (j,i).
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d[j * n + i] = d[i * n + j];
  }
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({"p" + std::to_string(i + 1), i % c.m, {}});
  return Dataset::with_matrix(std::move(pts), default_labels(c.m), std::move(d));
}

}  // namespace

Dataset generate_synthetic(const SyntheticConfig& config) {
  if (config.m == 0) throw Error("need at least one group");
  if (config.n < config.m) throw Error("need n >= m so that every group is populated");
  return config.dim == 0 ? graph_metric(config) : blobs(config);
}

}  // namespace fairdiv
