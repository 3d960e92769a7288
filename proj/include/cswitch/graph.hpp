#pragma once
// Interference graphs, clusterings of the unit set, and the dependence
// structure a clustering induces.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cswitch/rng.hpp"

namespace cswitch {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected graph over units 0..N-1. Closed neighborhoods (the unit plus its
/// neighbors) are precomputed and sorted.
class InterferenceGraph {
 public:
  InterferenceGraph() = default;

  /// Throws ValidationError on out-of-range endpoints or self-loops. Duplicate
  /// edges (in either orientation) are merged.
  static InterferenceGraph build(std::size_t n_units, std::span<const Edge> edges);

  std::size_t size() const { return closed_.size(); }

  std::span<const std::size_t> closed_neighborhood(std::size_t unit) const { return closed_[unit]; }

  std::size_t degree(std::size_t unit) const { return closed_[unit].size() - 1; }

  bool adjacent(std::size_t a, std::size_t b) const;

  /// Each undirected edge once, as (lo, hi), sorted.
  std::vector<Edge> edges() const;

  /// Hop distances from `source`; unreachable units get SIZE_MAX.
  std::vector<std::size_t> bfs_distances(std::size_t source) const;

 private:
  std::vector<std::vector<std::size_t>> closed_;
};

/// Units on a line, edge iff 0 < |i - j| <= h.
InterferenceGraph line_graph(std::size_t n_units, std::size_t h);

/// side x side grid, unit index row * side + col, edge iff Manhattan
/// distance <= h.
InterferenceGraph lattice_graph(std::size_t side, std::size_t h);

/// Partition of the unit set into disjoint nonempty clusters.
class Clustering {
 public:
  Clustering() = default;

  /// Throws ValidationError unless the clusters are nonempty, disjoint and
  /// cover 0..n_units-1. Cluster ids follow the order given.
  static Clustering from_clusters(std::size_t n_units, std::vector<std::vector<std::size_t>> clusters);

  /// Cluster ids are renumbered densely in order of first appearance.
  static Clustering from_assignment(std::span<const std::size_t> labels);

  std::size_t num_units() const { return assignment_.size(); }
  std::size_t num_clusters() const { return clusters_.size(); }
  std::size_t cluster_of(std::size_t unit) const { return assignment_[unit]; }
  std::span<const std::size_t> members(std::size_t cluster) const { return clusters_[cluster]; }
  const std::vector<std::vector<std::size_t>>& clusters() const { return clusters_; }

  bool operator==(const Clustering&) const = default;

 private:
  std::vector<std::size_t> assignment_;
  std::vector<std::vector<std::size_t>> clusters_;
};

Clustering singleton_clustering(std::size_t n);
Clustering whole_clustering(std::size_t n);

/// Axis-aligned s x s tiles of a side x side lattice; boundary tiles clipped.
Clustering lattice_uniform_clustering(std::size_t side, std::size_t s);

/// Contiguous segments of `width` units on a line; the last one may be shorter.
Clustering line_segment_clustering(std::size_t n, std::size_t width);

/// 1-hop-max random clustering: every unit draws an independent U(0,1) value
/// and joins the cluster labelled by the unit holding the largest value in its
/// closed neighborhood. Ties go to the lower index.
Clustering one_hop_max_clustering(const InterferenceGraph& g, Rng& rng);

/// Same rule with the values supplied.
Clustering one_hop_max_clustering(const InterferenceGraph& g, std::span<const double> values);

/// Clusters meeting N(i), with |N(i) ∩ C| as weight, ordered by cluster id.
struct ClusterWeight {
  std::size_t cluster;
  std::size_t weight;
};
std::vector<ClusterWeight> touching_clusters(const InterferenceGraph& g, const Clustering& pi,
                                             std::size_t unit);

/// Number of clusters meeting the closed neighborhood of `unit`.
std::size_t cluster_degree(const InterferenceGraph& g, const Clustering& pi, std::size_t unit);

/// Unordered pairs (i, i') whose closed neighborhoods meet a common cluster.
/// Self-pairs are always present.
class DependenceEdges {
 public:
  DependenceEdges(std::size_t n_units, std::vector<std::vector<std::size_t>> adjacency);

  std::size_t num_units() const { return adj_.size(); }
  bool contains(std::size_t a, std::size_t b) const;

  /// Units dependent on `unit`, sorted, including `unit` itself.
  std::span<const std::size_t> partners(std::size_t unit) const { return adj_[unit]; }

  /// Unordered pairs with a <= b.
  std::vector<Edge> pairs() const;

  /// Number of ordered pairs (i, i'), counting self-pairs once.
  std::size_t ordered_count() const;

 private:
  std::vector<std::vector<std::size_t>> adj_;
};

DependenceEdges dependence_edges(const InterferenceGraph& g, const Clustering& pi);

/// Smallest kappa with |N_{r+1}(i)| <= kappa |N_r(i)| for every r >= 1 and
/// every unit. Always >= 1.
double restricted_growth_coefficient(const InterferenceGraph& g);

// JSON documents: {"n": N, "edges": [[i, j], ...]} and {"clusters": [[...], ...]}.
nlohmann::json to_json(const InterferenceGraph& g);
InterferenceGraph graph_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Clustering& pi);
Clustering clustering_from_json(const nlohmann::json& doc, std::size_t n_units);

}  // namespace cswitch
