#pragma once

#include <optional>
#include <vector>

#include "topomatch/field.hpp"
#include "topomatch/hungarian.hpp"
#include "topomatch/persistence.hpp"

namespace topomatch {

inline constexpr double kDefaultTauPrimary = 0.1;

struct Match {
  std::size_t i = 0;
  std::size_t j = 0;
  double score = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

struct PairMatchResult {
  std::vector<Match> matches;  // sorted by i
  std::vector<std::size_t> unmatched_1;
  std::vector<std::size_t> unmatched_2;
  // Acceptance threshold; absent for the Wasserstein baseline.
  std::optional<double> threshold;
};

// A diagram together with everything MATCH-Pair needs about its features.
struct FeatureSet {
  PersistenceDiagram diagram;
  std::vector<FeatureMask> masks;
  std::vector<double> weights;
};

FeatureSet make_feature_set(const ScalarField& field, Connectivity connectivity,
                            std::vector<double> weights);
FeatureSet make_feature_set(const ScalarField& field, Connectivity connectivity);

// S_ij = w1_i * w2_j * IoU(M1_i, M2_j) * (1 - d_ij / d_max); d_ij is the
// Euclidean distance between birth pixels and d_max the largest d_ij of this
// call. Proximity is 1 when d_max is 0.
Matrix similarity_matrix(const FeatureSet& first, const FeatureSet& second);

Matrix similarity_matrix(const ScalarField& field1, const PersistenceDiagram& diag1,
                         const ScalarField& field2, const PersistenceDiagram& diag2,
                         const std::vector<double>& weights1, const std::vector<double>& weights2,
                         Connectivity connectivity = Connectivity::Eight);

// Assignment on cost 1 - S over the square matrix padded with cost 1, keeping
// pairs with S > tau. The bipartite graph of positive similarities is split
// into connected blocks that are solved independently; zero-similarity pairs
// never survive the filter, so the accepted set is unchanged.
PairMatchResult assign_similarity(const Matrix& similarity, double tau);

// Same as assign_similarity but runs one Hungarian solve on the full padded
// matrix. Kept as the reference path.
PairMatchResult assign_similarity_dense(const Matrix& similarity, double tau);

PairMatchResult match_pair(const ScalarField& field1, const ScalarField& field2,
                           double tau = kDefaultTauPrimary,
                           Connectivity connectivity = Connectivity::Eight);

// Persistence-only baseline: cost (b1-b2)^2 + (d1-d2)^2, each feature may go
// to the diagonal at cost (d-b)^2 / 2. Reported scores are pair costs.
PairMatchResult wasserstein_match(const PersistenceDiagram& diag1,
                                  const PersistenceDiagram& diag2);

}  // namespace topomatch
