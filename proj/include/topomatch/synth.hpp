#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "topomatch/field.hpp"
#include "topomatch/global_match.hpp"

namespace topomatch {

// SplitMix64 (Steele, Lea, Flood 2014). Distributions are derived by hand so
// streams do not depend on the standard library implementation.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  // Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }
  // Standard normal by Box-Muller; one draw consumes two uniforms.
  double normal();

 private:
  std::uint64_t state_;
};

struct BlobSpec {
  int id = 0;
  double row = 0.0;
  double col = 0.0;
  double amplitude = 1.0;  // (0, 1]
  double radius = 1.0;     // Gaussian sigma in pixels
};

// Each Gaussian contributes nothing beyond this many sigmas, so blobs have
// compact, disjoint supports when they are far enough apart.
inline constexpr double kBlobSupportSigmas = 3.0;

// clamp(background + sum_k a_k exp(-|p - c_k|^2 / (2 s_k^2)), 0, 1) with each
// term cut to zero outside kBlobSupportSigmas * s_k.
ScalarField gen_blobs(int width, int height, const std::vector<BlobSpec>& blobs,
                      double background = 0.0);

struct GaussianNoise {
  double sigma = 0.0;
};
// Tiles the image into patch x patch cells and zeroes each with probability rate.
struct PatchDropout {
  double rate = 0.0;
  int patch = 1;
};
// Scales the whole field by 1 + delta * u, u uniform in [-1, 1].
struct AmplitudeJitter {
  double delta = 0.0;
};
// Shifts content by (dy rows, dx cols); vacated pixels become 0.
struct Translate {
  int dx = 0;
  int dy = 0;
};

using Perturbation = std::variant<GaussianNoise, PatchDropout, AmplitudeJitter, Translate>;

std::string describe(const Perturbation& perturbation);

// Deterministic in (perturbation, seed); the output is clamped to [0,1].
ScalarField perturb(const ScalarField& field, const Perturbation& perturbation,
                    std::uint64_t seed);

inline constexpr int kNoBlob = -1;

struct FacetSet {
  ScalarField base;
  std::vector<BlobSpec> blobs;
  std::vector<ScalarField> facets;
  std::vector<std::vector<Perturbation>> plans;
  std::vector<std::uint64_t> seeds;
  // truth[t][i]: blob id of feature i of facet t, or kNoBlob.
  std::vector<std::vector<int>> truth;
};

// Labels feature i with blob k when its birth pixel lies within the blob's
// radius of the centre (nearest centre wins). Only the earliest-born feature
// claiming a blob keeps the label; the rest are noise.
std::vector<int> label_features(const PersistenceDiagram& diagram,
                                const std::vector<BlobSpec>& blobs);

// Applies `plans[t]` to the base with seed `seeds[t]`, then labels features.
FacetSet make_facet_set(ScalarField base, std::vector<BlobSpec> blobs,
                        std::vector<std::vector<Perturbation>> plans,
                        std::vector<std::uint64_t> seeds,
                        Connectivity connectivity = Connectivity::Eight);

// Fraction of track members carrying their track's majority blob id.
// Members without a blob are impure unless their track is a singleton.
double identity_purity(const GlobalTracks& tracks, const FacetSet& truth);

struct SwapScenario {
  ScalarField first;
  ScalarField second;
  std::vector<BlobSpec> blobs_first;
  std::vector<BlobSpec> blobs_second;
  // correspondence[i] = feature of `second` that truly matches feature i of
  // `first`.
  std::vector<std::size_t> correspondence;
};

// Two equal-amplitude blobs A and B on one row of the first field. The
// second field nudges and reshapes both blobs, with B lifted one row so the
// row-major order of the two birth pixels flips. Persistences stay equal,
// true pairs overlap and false pairs are disjoint.
SwapScenario swap_scenario(std::uint64_t seed);

struct ConsensusConfig {
  int width = 64;
  int height = 64;
  int blob_count = 5;
  double min_amplitude = 0.8;
  double max_amplitude = 1.0;
  double min_radius = 2.0;
  double max_radius = 3.0;
  double noise_sigma = 0.05;
  int facet_count = 4;
  double tau = 0.1;
  std::size_t min_support = 3;
};

// Random blobs with disjoint supports: centres are more than
// kBlobSupportSigmas * (s1 + s2) + 2 apart and each support stays inside the
// image.
std::vector<BlobSpec> random_blobs(const ConsensusConfig& config, SplitMix64& rng);

FacetSet consensus_facets(const ConsensusConfig& config, std::uint64_t seed);

struct ConsensusOutcome {
  double purity = 0.0;
  std::size_t tracks = 0;
  std::size_t stable_blob_tracks = 0;  // tracks with support >= min_support and a blob majority
};

ConsensusOutcome run_consensus(const ConsensusConfig& config, std::uint64_t seed);

}  // namespace topomatch
