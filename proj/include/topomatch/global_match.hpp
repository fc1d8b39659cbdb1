#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "topomatch/field.hpp"
#include "topomatch/matching.hpp"
#include "topomatch/persistence.hpp"

namespace topomatch {

// (facet t, feature i)
struct Vertex {
  std::size_t facet = 0;
  std::size_t feature = 0;

  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

struct Edge {
  Vertex a;  // a.facet + 1 == b.facet
  Vertex b;
  double score = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct FacetGraph {
  std::vector<std::size_t> feature_counts;  // n_t per facet
  std::vector<Edge> edges;

  std::size_t facet_count() const { return feature_counts.size(); }
  std::size_t vertex_count() const;
  // Vertices enumerated facet-major; this is also the BFS seed order.
  std::vector<Vertex> vertices() const;
};

struct Track {
  std::size_t id = 0;
  std::vector<Vertex> members;  // sorted

  // Distinct facets touched.
  std::size_t support() const;

  friend bool operator==(const Track&, const Track&) = default;
};

struct GlobalTracks {
  std::size_t facet_count = 0;
  // Ordered by smallest member; ids equal positions.
  std::vector<Track> tracks;

  friend bool operator==(const GlobalTracks&, const GlobalTracks&) = default;
};

struct StabilityClassification {
  std::set<Vertex> matched;
  std::set<Vertex> unmatched;
  std::size_t min_support = 1;
};

struct GlobalMatchResult {
  FacetGraph graph;
  GlobalTracks tracks;
  std::vector<FeatureSet> facets;  // diagrams, masks and global weights
};

// Per-facet weights normalized by the largest persistence over all facets.
// Throws InputError when there are no features at all.
std::vector<std::vector<double>> global_weights(const std::vector<PersistenceDiagram>& diagrams);

// Matches every adjacent pair (t, t+1) with MATCH-Pair under global weights
// and collects the connected components of the resulting graph by BFS.
GlobalMatchResult match_global(const std::vector<ScalarField>& fields,
                               double tau = kDefaultTauPrimary,
                               Connectivity connectivity = Connectivity::Eight);

// Connected components via breadth-first search from each unvisited vertex.
GlobalTracks components_bfs(const FacetGraph& graph);

// ceil(3T/4), at least 1.
std::size_t default_min_support(std::size_t facet_count);

// Throws InputError unless 1 <= min_support <= facet count.
StabilityClassification classify_stability(const GlobalTracks& tracks, std::size_t min_support);
StabilityClassification classify_stability(const GlobalTracks& tracks);

}  // namespace topomatch
