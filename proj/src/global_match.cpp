#include "topomatch/global_match.hpp"

#include <algorithm>
#include <string>

#include "topomatch/error.hpp"
#include "topomatch/parallel.hpp"

namespace topomatch {

std::size_t FacetGraph::vertex_count() const {
  std::size_t n = 0;
  for (const std::size_t c : feature_counts) n += c;
  return n;
}

std::vector<Vertex> FacetGraph::vertices() const {
  std::vector<Vertex> out;
  out.reserve(vertex_count());
  for (std::size_t t = 0; t < feature_counts.size(); ++t) {
    for (std::size_t i = 0; i < feature_counts[t]; ++i) out.push_back({t, i});
  }
  return out;
}

std::size_t Track::support() const {
  std::vector<std::size_t> facets;
  for (const auto& v : members) facets.push_back(v.facet);
  std::sort(facets.begin(), facets.end());
  return static_cast<std::size_t>(std::unique(facets.begin(), facets.end()) - facets.begin());
}

std::vector<std::vector<double>> global_weights(const std::vector<PersistenceDiagram>& diagrams) {
  double max_persistence = 0.0;
  std::size_t features = 0;
  for (const auto& d : diagrams) {
    features += d.size();
    for (const auto& f : d.features) max_persistence = std::max(max_persistence, f.persistence());
  }
  if (features == 0) throw InputError("global_weights: no features in any facet");
  std::vector<std::vector<double>> weights;
  weights.reserve(diagrams.size());
  for (const auto& d : diagrams) {
    std::vector<double> w(d.size(), 0.0);
    if (max_persistence > 0.0) {
      for (std::size_t i = 0; i < d.size(); ++i) w[i] = d[i].persistence() / max_persistence;
    }
    weights.push_back(std::move(w));
  }
  return weights;
}

GlobalMatchResult match_global(const std::vector<ScalarField>& fields, double tau,
                               Connectivity connectivity) {
  if (fields.size() < 2) throw InputError("match_global needs at least 2 facets");
  for (const auto& f : fields) {
    if (f.width() != fields.front().width() || f.height() != fields.front().height()) {
      throw InputError("match_global: facets have different dimensions");
    }
  }
  const std::size_t facet_count = fields.size();

  GlobalMatchResult result;
  result.facets.resize(facet_count);
  parallel_for(facet_count, [&](std::size_t t) {
    auto& set = result.facets[t];
    set.diagram = compute_diagram(fields[t], connectivity);
    set.masks = extract_masks(fields[t], set.diagram, connectivity);
  });
  std::vector<PersistenceDiagram> diagrams;
  for (const auto& set : result.facets) diagrams.push_back(set.diagram);
  auto weights = global_weights(diagrams);
  for (std::size_t t = 0; t < facet_count; ++t) result.facets[t].weights = std::move(weights[t]);

  std::vector<PairMatchResult> pairs(facet_count - 1);
  parallel_for(facet_count - 1, [&](std::size_t t) {
    pairs[t] = assign_similarity(similarity_matrix(result.facets[t], result.facets[t + 1]), tau);
  });

  for (const auto& d : diagrams) result.graph.feature_counts.push_back(d.size());
  for (std::size_t t = 0; t + 1 < facet_count; ++t) {
    for (const auto& m : pairs[t].matches) {
      result.graph.edges.push_back({{t, m.i}, {t + 1, m.j}, m.score});
    }
  }
  result.tracks = components_bfs(result.graph);
  return result;
}

GlobalTracks components_bfs(const FacetGraph& graph) {
  const auto vertices = graph.vertices();
  std::vector<std::size_t> offset(graph.facet_count() + 1, 0);
  for (std::size_t t = 0; t < graph.facet_count(); ++t) {
    offset[t + 1] = offset[t] + graph.feature_counts[t];
  }
  auto id = [&](const Vertex& v) {
    if (v.facet >= graph.facet_count() || v.feature >= graph.feature_counts[v.facet]) {
      throw InvariantError("edge references a vertex outside the graph");
    }
    return offset[v.facet] + v.feature;
  };

  std::vector<std::vector<std::size_t>> adjacency(vertices.size());
  for (const auto& e : graph.edges) {
    if (e.a.facet + 1 != e.b.facet) throw InvariantError("edge joins non-adjacent facets");
    adjacency[id(e.a)].push_back(id(e.b));
    adjacency[id(e.b)].push_back(id(e.a));
  }

  GlobalTracks tracks;
  tracks.facet_count = graph.facet_count();
  std::vector<char> seen(vertices.size(), 0);
  std::vector<std::size_t> queue;
  for (std::size_t s = 0; s < vertices.size(); ++s) {
    if (seen[s]) continue;
    Track track;
    track.id = tracks.tracks.size();
    queue.assign(1, s);
    seen[s] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t v = queue[head];
      track.members.push_back(vertices[v]);
      for (const std::size_t w : adjacency[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
    std::sort(track.members.begin(), track.members.end());
    tracks.tracks.push_back(std::move(track));
  }
  return tracks;
}

std::size_t default_min_support(std::size_t facet_count) {
  return std::max<std::size_t>(1, (3 * facet_count + 3) / 4);
}

StabilityClassification classify_stability(const GlobalTracks& tracks, std::size_t min_support) {
  if (min_support < 1 || min_support > tracks.facet_count) {
    throw InputError("min_support " + std::to_string(min_support) + " outside [1, " +
                     std::to_string(tracks.facet_count) + "]");
  }
  StabilityClassification out;
  out.min_support = min_support;
  for (const auto& track : tracks.tracks) {
    auto& target = track.support() >= min_support ? out.matched : out.unmatched;
    target.insert(track.members.begin(), track.members.end());
  }
  return out;
}

StabilityClassification classify_stability(const GlobalTracks& tracks) {
  return classify_stability(tracks, default_min_support(tracks.facet_count));
}

}  // namespace topomatch
