#include "cswitch/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>

#include "cswitch/error.hpp"

namespace cswitch {

InterferenceGraph InterferenceGraph::build(std::size_t n_units, std::span<const Edge> edges) {
  InterferenceGraph g;
  g.closed_.resize(n_units);
  for (std::size_t i = 0; i < n_units; ++i) g.closed_[i].push_back(i);
  for (auto [a, b] : edges) {
    require(a < n_units && b < n_units,
            "edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range for " +
                std::to_string(n_units) + " units");
    require(a != b, "self-loop at unit " + std::to_string(a));
    g.closed_[a].push_back(b);
    g.closed_[b].push_back(a);
  }
  for (auto& nb : g.closed_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

bool InterferenceGraph::adjacent(std::size_t a, std::size_t b) const {
  if (a == b) return false;
  const auto& nb = closed_[a];
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::vector<Edge> InterferenceGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < closed_.size(); ++i) {
    for (std::size_t j : closed_[i]) {
      if (j > i) out.emplace_back(i, j);
    }
  }
  return out;
}

std::vector<std::size_t> InterferenceGraph::bfs_distances(std::size_t source) const {
  constexpr auto unreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(size(), unreached);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : closed_[u]) {
      if (dist[v] == unreached) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

InterferenceGraph line_graph(std::size_t n_units, std::size_t h) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n_units; ++i) {
    for (std::size_t j = i + 1; j < n_units && j - i <= h; ++j) edges.emplace_back(i, j);
  }
  return InterferenceGraph::build(n_units, edges);
}

InterferenceGraph lattice_graph(std::size_t side, std::size_t h) {
  std::vector<Edge> edges;
  const auto n = side * side;
  for (std::size_t a = 0; a < n; ++a) {
    const auto ra = a / side, ca = a % side;
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto rb = b / side, cb = b % side;
      const auto dr = ra > rb ? ra - rb : rb - ra;
      const auto dc = ca > cb ? ca - cb : cb - ca;
      if (dr + dc <= h) edges.emplace_back(a, b);
    }
  }
  return InterferenceGraph::build(n, edges);
}

Clustering Clustering::from_clusters(std::size_t n_units,
                                     std::vector<std::vector<std::size_t>> clusters) {
  constexpr auto unset = std::numeric_limits<std::size_t>::max();
  Clustering pi;
  pi.assignment_.assign(n_units, unset);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    require(!clusters[c].empty(), "cluster " + std::to_string(c) + " is empty");
    std::sort(clusters[c].begin(), clusters[c].end());
    for (std::size_t u : clusters[c]) {
      require(u < n_units, "cluster member " + std::to_string(u) + " out of range");
      require(pi.assignment_[u] == unset, "unit " + std::to_string(u) + " in two clusters");
      pi.assignment_[u] = c;
    }
  }
  for (std::size_t u = 0; u < n_units; ++u) {
    require(pi.assignment_[u] != unset, "unit " + std::to_string(u) + " not covered");
  }
  pi.clusters_ = std::move(clusters);
  return pi;
}

Clustering Clustering::from_assignment(std::span<const std::size_t> labels) {
  std::vector<std::vector<std::size_t>> clusters;
  // Labels may be sparse (e.g. a unit index used as a center id).
  std::vector<std::size_t> table;
  for (std::size_t u = 0; u < labels.size(); ++u) {
    const auto l = labels[u];
    if (l >= table.size()) table.resize(l + 1, std::numeric_limits<std::size_t>::max());
    if (table[l] == std::numeric_limits<std::size_t>::max()) {
      table[l] = clusters.size();
      clusters.emplace_back();
    }
    clusters[table[l]].push_back(u);
  }
  return from_clusters(labels.size(), std::move(clusters));
}

Clustering singleton_clustering(std::size_t n) {
  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
  return Clustering::from_clusters(n, std::move(clusters));
}

Clustering whole_clustering(std::size_t n) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  return Clustering::from_clusters(n, {std::move(all)});
}

Clustering lattice_uniform_clustering(std::size_t side, std::size_t s) {
  require(side >= 1 && s >= 1, "lattice clustering needs side >= 1 and s >= 1");
  const auto tiles = (side + s - 1) / s;
  std::vector<std::size_t> labels(side * side);
  for (std::size_t u = 0; u < labels.size(); ++u) {
    labels[u] = (u / side / s) * tiles + (u % side) / s;
  }
  return Clustering::from_assignment(labels);
}

Clustering line_segment_clustering(std::size_t n, std::size_t width) {
  require(width >= 1, "segment width must be >= 1");
  std::vector<std::size_t> labels(n);
  for (std::size_t u = 0; u < n; ++u) labels[u] = u / width;
  return Clustering::from_assignment(labels);
}

Clustering one_hop_max_clustering(const InterferenceGraph& g, std::span<const double> values) {
  require(values.size() == g.size(), "one value per unit required");
  std::vector<std::size_t> labels(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::size_t best = i;
    for (std::size_t j : g.closed_neighborhood(i)) {
      if (values[j] > values[best] || (values[j] == values[best] && j < best)) best = j;
    }
    labels[i] = best;
  }
  return Clustering::from_assignment(labels);
}

Clustering one_hop_max_clustering(const InterferenceGraph& g, Rng& rng) {
  std::vector<double> values(g.size());
  for (double& v : values) v = uniform01(rng);
  return one_hop_max_clustering(g, values);
}

std::vector<ClusterWeight> touching_clusters(const InterferenceGraph& g, const Clustering& pi,
                                             std::size_t unit) {
  std::vector<ClusterWeight> out;
  for (std::size_t j : g.closed_neighborhood(unit)) {
    const auto c = pi.cluster_of(j);
    auto it = std::find_if(out.begin(), out.end(), [c](const ClusterWeight& w) { return w.cluster == c; });
    if (it == out.end()) {
      out.push_back({c, 1});
    } else {
      ++it->weight;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ClusterWeight& a, const ClusterWeight& b) { return a.cluster < b.cluster; });
  return out;
}

std::size_t cluster_degree(const InterferenceGraph& g, const Clustering& pi, std::size_t unit) {
  return touching_clusters(g, pi, unit).size();
}

DependenceEdges::DependenceEdges(std::size_t n_units, std::vector<std::vector<std::size_t>> adjacency)
    : adj_(std::move(adjacency)) {
  require(adj_.size() == n_units, "dependence adjacency size mismatch");
}

bool DependenceEdges::contains(std::size_t a, std::size_t b) const {
  const auto& p = adj_[a];
  return std::binary_search(p.begin(), p.end(), b);
}

std::vector<Edge> DependenceEdges::pairs() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < adj_.size(); ++i) {
    for (std::size_t j : adj_[i]) {
      if (j >= i) out.emplace_back(i, j);
    }
  }
  return out;
}

std::size_t DependenceEdges::ordered_count() const {
  std::size_t total = 0;
  for (const auto& p : adj_) total += p.size();
  return total;
}

DependenceEdges dependence_edges(const InterferenceGraph& g, const Clustering& pi) {
  const auto n = g.size();
  require(pi.num_units() == n, "clustering and graph disagree on the number of units");
  // reach[C] = units whose closed neighborhood meets C.
  std::vector<std::vector<std::size_t>> reach(pi.num_clusters());
  std::vector<std::vector<std::size_t>> touched(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& cw : touching_clusters(g, pi, i)) {
      reach[cw.cluster].push_back(i);
      touched[i].push_back(cw.cluster);
    }
  }
  std::vector<std::vector<std::size_t>> adj(n);
  std::vector<std::size_t> mark(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c : touched[i]) {
      for (std::size_t j : reach[c]) {
        if (mark[j] != i) {
          mark[j] = i;
          adj[i].push_back(j);
        }
      }
    }
    std::sort(adj[i].begin(), adj[i].end());
  }
  return DependenceEdges(n, std::move(adj));
}

double restricted_growth_coefficient(const InterferenceGraph& g) {
  double kappa = 1.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto dist = g.bfs_distances(i);
    std::size_t ecc = 0;
    for (auto d : dist) {
      if (d != std::numeric_limits<std::size_t>::max()) ecc = std::max(ecc, d);
    }
    std::vector<std::size_t> ball(ecc + 2, 0);
    for (auto d : dist) {
      if (d != std::numeric_limits<std::size_t>::max()) ++ball[d];
    }
    for (std::size_t r = 1; r < ball.size(); ++r) ball[r] += ball[r - 1];
    for (std::size_t r = 1; r + 1 < ball.size(); ++r) {
      kappa = std::max(kappa, static_cast<double>(ball[r + 1]) / static_cast<double>(ball[r]));
    }
  }
  return kappa;
}

nlohmann::json to_json(const InterferenceGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (auto [a, b] : g.edges()) edges.push_back({a, b});
  return {{"n", g.size()}, {"edges", edges}};
}

InterferenceGraph graph_from_json(const nlohmann::json& doc) {
  require(doc.is_object() && doc.contains("n"), "graph document needs an \"n\" field");
  const auto n = doc.at("n").get<std::size_t>();
  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    for (const auto& e : doc.at("edges")) {
      require(e.is_array() && e.size() == 2, "edges must be [i, j] pairs");
      edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
    }
  }
  return InterferenceGraph::build(n, edges);
}

nlohmann::json to_json(const Clustering& pi) { return {{"clusters", pi.clusters()}}; }

Clustering clustering_from_json(const nlohmann::json& doc, std::size_t n_units) {
  require(doc.is_object() && doc.contains("clusters"), "clustering document needs \"clusters\"");
  return Clustering::from_clusters(n_units,
                                   doc.at("clusters").get<std::vector<std::vector<std::size_t>>>());
}

}  // namespace cswitch
