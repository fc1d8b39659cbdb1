#include <gtest/gtest.h>

#include "oracles.hpp"
#include "topomatch/error.hpp"
#include "topomatch/global_match.hpp"
#include "topomatch/synth.hpp"

namespace topomatch {
namespace {

std::vector<BlobSpec> three_blobs() {
  return {{0, 10, 10, 0.9, 2.5}, {1, 10, 40, 0.85, 2.0}, {2, 30, 25, 0.95, 3.0}};
}

TEST(GlobalWeights, NormalizesAcrossFacets) {
  const ScalarField a(3, 1, {0.9, 0.0, 0.0});  // persistence 0.9
  const ScalarField b(3, 1, {0.6, 0.0, 0.0});  // persistence 0.6
  const auto w = global_weights({compute_diagram(a), compute_diagram(b)});
  EXPECT_EQ(w[0][0], 1.0);
  EXPECT_NEAR(w[1][0], 0.6 / 0.9, 1e-12);
  EXPECT_NEAR(w[1][0], 0.667, 1e-3);
}

TEST(GlobalWeights, SingleFacetEqualsFeatureWeights) {
  SplitMix64 rng(3);
  const auto d = compute_diagram(oracle::grid_field(9, 9, rng));
  EXPECT_EQ(global_weights({d}).front(), feature_weights(d));
}

TEST(GlobalWeights, ZeroPersistenceAndEmpty) {
  const auto z = compute_diagram(ScalarField::constant(3, 3, 0.0));
  EXPECT_EQ(global_weights({z, z}), (std::vector<std::vector<double>>{{0.0}, {0.0}}));
  EXPECT_THROW(global_weights({PersistenceDiagram{}}), InputError);
  EXPECT_THROW(global_weights({}), InputError);
}

TEST(MatchGlobal, IdenticalCopiesGiveFullSupportTracks) {
  const auto f = gen_blobs(50, 40, three_blobs());
  for (std::size_t T : {2u, 4u, 5u}) {
    const auto r = match_global(std::vector<ScalarField>(T, f));
    ASSERT_EQ(r.tracks.tracks.size(), 3u);
    for (const auto& t : r.tracks.tracks) EXPECT_EQ(t.support(), T);
  }
}

TEST(MatchGlobal, MissingMiddleDetectionSplitsTrack) {
  const auto full = gen_blobs(50, 40, three_blobs());
  auto blobs = three_blobs();
  blobs.erase(blobs.begin() + 1);
  const auto missing = gen_blobs(50, 40, blobs);
  const auto r = match_global({full, full, missing, full});
  // Blob 1 = feature index 2 in full facets (births sorted 0.05, 0.1, 0.15).
  std::vector<std::size_t> supports;
  for (const auto& t : r.tracks.tracks) supports.push_back(t.support());
  std::sort(supports.begin(), supports.end());
  EXPECT_EQ(supports, (std::vector<std::size_t>{1, 2, 4, 4}));
  bool found_pair = false;
  for (const auto& t : r.tracks.tracks) {
    if (t.support() == 2) {
      EXPECT_EQ(t.members, (std::vector<Vertex>{{0, 2}, {1, 2}}));
      found_pair = true;
    }
    if (t.support() == 1) EXPECT_EQ(t.members, (std::vector<Vertex>{{3, 2}}));
  }
  EXPECT_TRUE(found_pair);
}

TEST(MatchGlobal, Errors) {
  EXPECT_THROW(match_global({ScalarField::constant(3, 3, 0.5)}), InputError);
  EXPECT_THROW(match_global({ScalarField::constant(3, 3, 0.5), ScalarField::constant(3, 2, 0.5)}),
               InputError);
}

TEST(MatchGlobal, BfsEqualsUnionFindAndClosure) {
  ConsensusConfig config;
  config.width = 48;
  config.height = 48;
  config.blob_count = 3;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto set = consensus_facets(config, seed);
    const auto r = match_global(set.facets);
    const auto bfs = oracle::partition_of(r.tracks);
    EXPECT_EQ(bfs, oracle::union_find_partition(r.graph));
    EXPECT_EQ(bfs, oracle::closure_partition(r.graph));
  }
}

TEST(MatchGlobal, TracksPartitionVerticesWithOneFeaturePerFacet) {
  ConsensusConfig config;
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const auto set = consensus_facets(config, seed);
    const auto r = match_global(set.facets);
    std::set<Vertex> seen;
    for (const auto& t : r.tracks.tracks) {
      EXPECT_EQ(t.support(), t.members.size());
      for (const auto& v : t.members) EXPECT_TRUE(seen.insert(v).second);
    }
    EXPECT_EQ(seen.size(), r.graph.vertex_count());
    for (const auto& e : r.graph.edges) EXPECT_EQ(e.a.facet + 1, e.b.facet);
  }
}

TEST(ComponentsBfs, HandBuiltGraph) {
  FacetGraph g{{2, 2, 1}, {{{0, 0}, {1, 1}, 0.5}, {{1, 1}, {2, 0}, 0.4}}};
  const auto t = components_bfs(g);
  ASSERT_EQ(t.tracks.size(), 3u);
  EXPECT_EQ(t.tracks[0].members, (std::vector<Vertex>{{0, 0}, {1, 1}, {2, 0}}));
  EXPECT_EQ(t.tracks[1].members, (std::vector<Vertex>{{0, 1}}));
  EXPECT_EQ(t.tracks[2].members, (std::vector<Vertex>{{1, 0}}));
  FacetGraph skip{{1, 1, 1}, {{{0, 0}, {2, 0}, 0.5}}};
  EXPECT_THROW(components_bfs(skip), InvariantError);
}

TEST(ComponentsBfs, PartitionInvariantUnderFeatureReindexing) {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const std::vector<std::size_t> counts{4, 5, 3, 4};
    FacetGraph g{counts, {}};
    for (std::size_t t = 0; t + 1 < counts.size(); ++t) {
      std::vector<std::size_t> cols(counts[t + 1]);
      std::iota(cols.begin(), cols.end(), 0);
      for (std::size_t i = cols.size(); i > 1; --i) std::swap(cols[i - 1], cols[rng.below(i)]);
      for (std::size_t i = 0; i < std::min(counts[t], counts[t + 1]); ++i) {
        if (rng.uniform() < 0.6) g.edges.push_back({{t, i}, {t + 1, cols[i]}, 1.0});
      }
    }
    // Random relabelling of each facet's features.
    std::vector<std::vector<std::size_t>> perm;
    for (auto n : counts) {
      std::vector<std::size_t> p(n);
      std::iota(p.begin(), p.end(), 0);
      for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
      perm.push_back(p);
    }
    FacetGraph h{counts, {}};
    for (const auto& e : g.edges) {
      h.edges.push_back({{e.a.facet, perm[e.a.facet][e.a.feature]},
                         {e.b.facet, perm[e.b.facet][e.b.feature]}, e.score});
    }
    oracle::Partition mapped;
    for (const auto& group : oracle::partition_of(components_bfs(g))) {
      std::set<Vertex> m;
      for (const auto& v : group) m.insert({v.facet, perm[v.facet][v.feature]});
      mapped.insert(m);
    }
    EXPECT_EQ(mapped, oracle::partition_of(components_bfs(h)));
  }
}

GlobalTracks supports_tracks(std::size_t T, const std::vector<std::size_t>& supports) {
  GlobalTracks tracks;
  tracks.facet_count = T;
  std::size_t feature = 0;
  for (const auto s : supports) {
    Track t{tracks.tracks.size(), {}};
    for (std::size_t f = 0; f < s; ++f) t.members.push_back({f, feature});
    ++feature;
    tracks.tracks.push_back(t);
  }
  return tracks;
}

TEST(ClassifyStability, FigureOneConvention) {
  const auto tracks = supports_tracks(4, {4, 3, 2, 1});
  const auto c = classify_stability(tracks, 3);
  EXPECT_EQ(c.matched.size(), 7u);
  EXPECT_EQ(c.unmatched.size(), 3u);
  EXPECT_TRUE(c.matched.count({0, 0}));
  EXPECT_TRUE(c.unmatched.count({0, 3}));
  EXPECT_EQ(default_min_support(4), 3u);
  EXPECT_EQ(default_min_support(1), 1u);
  EXPECT_EQ(default_min_support(5), 4u);
  EXPECT_EQ(classify_stability(tracks).min_support, 3u);
}

TEST(ClassifyStability, VacuousAndRangeChecks) {
  const auto tracks = supports_tracks(4, {1, 2});
  EXPECT_EQ(classify_stability(tracks, 1).unmatched.size(), 0u);
  for (std::size_t m = 2; m <= 4; ++m) EXPECT_TRUE(classify_stability(tracks, m).unmatched.count({0, 0}));
  EXPECT_THROW(classify_stability(tracks, 0), InputError);
  EXPECT_THROW(classify_stability(tracks, 5), InputError);
}

TEST(ClassifyStability, MonotoneInMinSupport) {
  const auto tracks = supports_tracks(6, {6, 1, 3, 5, 2, 4, 4});
  for (std::size_t m = 1; m < 6; ++m) {
    const auto lo = classify_stability(tracks, m), hi = classify_stability(tracks, m + 1);
    for (const auto& v : lo.unmatched) EXPECT_TRUE(hi.unmatched.count(v));
    EXPECT_EQ(lo.matched.size() + lo.unmatched.size(), hi.matched.size() + hi.unmatched.size());
  }
}

}  // namespace
}  // namespace topomatch
