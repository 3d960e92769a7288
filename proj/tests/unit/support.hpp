#pragma once
// Small random generators for property tests.

#include <cmath>
#include <vector>

#include "cswitch/dynamics.hpp"
#include "cswitch/graph.hpp"
#include "cswitch/rng.hpp"

namespace testing {

using namespace cswitch;

inline InterferenceGraph random_graph(std::size_t n, double edge_prob, Rng& rng) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (uniform01(rng) < edge_prob) edges.emplace_back(i, j);
    }
  }
  return InterferenceGraph::build(n, edges);
}

inline std::vector<double> random_distribution(std::size_t n, Rng& rng) {
  std::vector<double> f(n);
  double s = 0.0;
  for (auto& x : f) s += (x = uniform01(rng));
  for (auto& x : f) x /= s;
  return f;
}

/// Random kernel; each entry is zeroed with probability `sparsity`.
inline TabularKernel random_kernel(std::size_t n, Rng& rng, double sparsity = 0.0) {
  std::vector<double> m(n * n);
  for (std::size_t s = 0; s < n; ++s) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double v = uniform01(rng) < sparsity ? 0.0 : uniform01(rng);
      if (j == s) v += 1e-3;
      m[s * n + j] = v;
      total += v;
    }
    for (std::size_t j = 0; j < n; ++j) m[s * n + j] /= total;
  }
  return TabularKernel(n, std::move(m));
}

inline Clustering random_clustering(std::size_t n, std::size_t max_clusters, Rng& rng) {
  std::vector<std::size_t> labels(n);
  for (auto& l : labels) l = rng() % max_clusters;
  return Clustering::from_assignment(labels);
}

/// |sample mean - expected| measured in standard errors.
inline double z_score(double sample_mean, double expected, double sd, double n) {
  if (sd <= 0.0) return sample_mean == expected ? 0.0 : INFINITY;
  return std::fabs(sample_mean - expected) / (sd / std::sqrt(n));
}

}  // namespace testing
