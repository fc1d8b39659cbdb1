#include "topomatch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "topomatch/error.hpp"
#include "topomatch/persistence.hpp"

namespace topomatch {

double SplitMix64::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ScalarField gen_blobs(int width, int height, const std::vector<BlobSpec>& blobs,
                      double background) {
  if (width <= 0 || height <= 0) throw InputError("gen_blobs: dimensions must be positive");
  if (!(background >= 0.0 && background <= 1.0)) {
    throw InputError("gen_blobs: background outside [0,1]");
  }
  for (const auto& b : blobs) {
    if (!(b.amplitude > 0.0 && b.amplitude <= 1.0)) {
      throw InputError("gen_blobs: blob " + std::to_string(b.id) + " amplitude outside (0,1]");
    }
    if (!(b.radius > 0.0)) {
      throw InputError("gen_blobs: blob " + std::to_string(b.id) + " radius must be positive");
    }
    if (b.row < 0.0 || b.col < 0.0 || b.row > height - 1 || b.col > width - 1) {
      throw InputError("gen_blobs: blob " + std::to_string(b.id) + " centre outside the image");
    }
  }
  std::vector<double> values(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double v = background;
      for (const auto& b : blobs) {
        const double dr = r - b.row;
        const double dc = c - b.col;
        const double d2 = dr * dr + dc * dc;
        const double cutoff = kBlobSupportSigmas * b.radius;
        if (d2 > cutoff * cutoff) continue;
        v += b.amplitude * std::exp(-d2 / (2.0 * b.radius * b.radius));
      }
      values[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) +
             static_cast<std::size_t>(c)] = std::clamp(v, 0.0, 1.0);
    }
  }
  return ScalarField(width, height, std::move(values));
}

std::string describe(const Perturbation& perturbation) {
  std::ostringstream out;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianNoise>) {
          out << "gaussian_noise(sigma=" << p.sigma << ")";
        } else if constexpr (std::is_same_v<T, PatchDropout>) {
          out << "patch_dropout(rate=" << p.rate << ",patch=" << p.patch << ")";
        } else if constexpr (std::is_same_v<T, AmplitudeJitter>) {
          out << "amplitude_jitter(delta=" << p.delta << ")";
        } else {
          out << "translate(dx=" << p.dx << ",dy=" << p.dy << ")";
        }
      },
      perturbation);
  return out.str();
}

ScalarField perturb(const ScalarField& field, const Perturbation& perturbation,
                    std::uint64_t seed) {
  SplitMix64 rng(seed);
  const int width = field.width();
  const int height = field.height();
  std::vector<double> out(field.values().begin(), field.values().end());

  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianNoise>) {
          if (!(p.sigma >= 0.0)) throw InputError("gaussian_noise: sigma must be >= 0");
          if (p.sigma == 0.0) return;
          for (auto& v : out) v += p.sigma * rng.normal();
        } else if constexpr (std::is_same_v<T, PatchDropout>) {
          if (!(p.rate >= 0.0 && p.rate <= 1.0)) throw InputError("patch_dropout: rate outside [0,1]");
          if (p.patch < 1) throw InputError("patch_dropout: patch must be >= 1");
          for (int r0 = 0; r0 < height; r0 += p.patch) {
            for (int c0 = 0; c0 < width; c0 += p.patch) {
              if (!(rng.uniform() < p.rate)) continue;
              for (int r = r0; r < std::min(height, r0 + p.patch); ++r) {
                for (int c = c0; c < std::min(width, c0 + p.patch); ++c) {
                  out[field.index(r, c)] = 0.0;
                }
              }
            }
          }
        } else if constexpr (std::is_same_v<T, AmplitudeJitter>) {
          if (!(std::abs(p.delta) < 1.0)) throw InputError("amplitude_jitter: |delta| must be < 1");
          const double scale = 1.0 + p.delta * rng.uniform(-1.0, 1.0);
          for (auto& v : out) v *= scale;
        } else {
          for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
              const int sr = r - p.dy;
              const int sc = c - p.dx;
              const bool inside = sr >= 0 && sc >= 0 && sr < height && sc < width;
              out[field.index(r, c)] = inside ? field.at(sr, sc) : 0.0;
            }
          }
        }
      },
      perturbation);
  for (auto& v : out) v = std::clamp(v, 0.0, 1.0);
  return ScalarField(width, height, std::move(out));
}

std::vector<int> label_features(const PersistenceDiagram& diagram,
                                const std::vector<BlobSpec>& blobs) {
  std::vector<int> labels(diagram.size(), kNoBlob);
  std::map<int, bool> claimed;
  for (std::size_t i = 0; i < diagram.size(); ++i) {
    const Pixel p = diagram[i].birth_pixel;
    const BlobSpec* nearest = nullptr;
    double best = 0.0;
    for (const auto& b : blobs) {
      const double d = std::hypot(p.row - b.row, p.col - b.col);
      if (d <= b.radius && (!nearest || d < best)) {
        nearest = &b;
        best = d;
      }
    }
    // Diagram order is birth order, so the first claimant is the earliest born.
    if (nearest && !claimed[nearest->id]) {
      claimed[nearest->id] = true;
      labels[i] = nearest->id;
    }
  }
  return labels;
}

FacetSet make_facet_set(ScalarField base, std::vector<BlobSpec> blobs,
                        std::vector<std::vector<Perturbation>> plans,
                        std::vector<std::uint64_t> seeds, Connectivity connectivity) {
  if (plans.size() != seeds.size()) throw InputError("one seed per facet plan is required");
  FacetSet set;
  set.base = std::move(base);
  set.blobs = std::move(blobs);
  for (std::size_t t = 0; t < plans.size(); ++t) {
    ScalarField facet = set.base;
    SplitMix64 seeder(seeds[t]);
    for (const auto& step : plans[t]) facet = perturb(facet, step, seeder.next());
    set.truth.push_back(label_features(compute_diagram(facet, connectivity), set.blobs));
    set.facets.push_back(std::move(facet));
  }
  set.plans = std::move(plans);
  set.seeds = std::move(seeds);
  return set;
}

double identity_purity(const GlobalTracks& tracks, const FacetSet& truth) {
  std::size_t members = 0;
  std::size_t pure = 0;
  for (const auto& track : tracks.tracks) {
    members += track.members.size();
    if (track.members.size() == 1) {
      ++pure;
      continue;
    }
    std::map<int, std::size_t> votes;
    for (const auto& v : track.members) {
      const int id = truth.truth.at(v.facet).at(v.feature);
      if (id != kNoBlob) ++votes[id];
    }
    if (votes.empty()) continue;
    // Ties go to the smallest id (map order, strict >).
    auto majority = votes.begin();
    for (auto it = votes.begin(); it != votes.end(); ++it) {
      if (it->second > majority->second) majority = it;
    }
    pure += majority->second;
  }
  return members == 0 ? 1.0 : static_cast<double>(pure) / static_cast<double>(members);
}

SwapScenario swap_scenario(std::uint64_t seed) {
  constexpr int kWidth = 64;
  constexpr int kHeight = 40;
  constexpr double kMaxRadius = 3.3;  // 3.0 plus 10% jitter
  const int margin = static_cast<int>(std::ceil(kBlobSupportSigmas * kMaxRadius)) + 2;

  SplitMix64 rng(seed);
  const double amplitude = rng.uniform(0.8, 1.0);
  const double radius_a = rng.uniform(2.0, 3.0);
  const double radius_b = rng.uniform(2.0, 3.0);
  const int row = margin + 1 + static_cast<int>(rng.below(kHeight - 2 * margin - 2));
  const int gap = 24 + static_cast<int>(rng.below(7));
  const int col_a = margin + static_cast<int>(rng.below(kWidth - 1 - 2 * margin - gap + 1));
  const int col_b = col_a + gap;

  auto jitter = [&](double r) { return r * rng.uniform(0.9, 1.1); };
  auto step = [&] { return static_cast<int>(rng.below(3)) - 1; };

  SwapScenario s;
  s.blobs_first = {{0, double(row), double(col_a), amplitude, radius_a},
                   {1, double(row), double(col_b), amplitude, radius_b}};
  s.blobs_second = {{0, double(row + static_cast<int>(rng.below(2))), double(col_a + step()),
                     amplitude, jitter(radius_a)},
                    {1, double(row - 1), double(col_b + step()), amplitude, jitter(radius_b)}};
  s.first = gen_blobs(kWidth, kHeight, s.blobs_first);
  s.second = gen_blobs(kWidth, kHeight, s.blobs_second);

  const auto labels1 = label_features(compute_diagram(s.first), s.blobs_first);
  const auto labels2 = label_features(compute_diagram(s.second), s.blobs_second);
  s.correspondence.assign(labels1.size(), 0);
  for (std::size_t i = 0; i < labels1.size(); ++i) {
    const auto it = std::find(labels2.begin(), labels2.end(), labels1[i]);
    if (labels1[i] == kNoBlob || it == labels2.end()) {
      throw InvariantError("swap scenario lost a blob feature");
    }
    s.correspondence[i] = static_cast<std::size_t>(it - labels2.begin());
  }
  return s;
}

std::vector<BlobSpec> random_blobs(const ConsensusConfig& config, SplitMix64& rng) {
  std::vector<BlobSpec> blobs;
  int stalled = 0;
  for (int attempt = 0; static_cast<int>(blobs.size()) < config.blob_count; ++attempt) {
    if (attempt > 100000) throw InputError("random_blobs: cannot place blobs without overlap");
    // A greedy layout can paint itself into a corner; start over.
    if (++stalled > 1000) {
      blobs.clear();
      stalled = 0;
    }
    const double radius = rng.uniform(config.min_radius, config.max_radius);
    const double reach = std::ceil(kBlobSupportSigmas * radius);
    BlobSpec b;
    b.id = static_cast<int>(blobs.size());
    b.radius = radius;
    b.amplitude = rng.uniform(config.min_amplitude, config.max_amplitude);
    b.row = std::floor(rng.uniform(reach, config.height - 1 - reach));
    b.col = std::floor(rng.uniform(reach, config.width - 1 - reach));
    const bool clear = std::all_of(blobs.begin(), blobs.end(), [&](const BlobSpec& o) {
      return std::hypot(b.row - o.row, b.col - o.col) >
             kBlobSupportSigmas * (b.radius + o.radius) + 2.0;
    });
    if (clear) {
      blobs.push_back(b);
      stalled = 0;
    }
  }
  return blobs;
}

FacetSet consensus_facets(const ConsensusConfig& config, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<BlobSpec> blobs = random_blobs(config, rng);
  ScalarField base = gen_blobs(config.width, config.height, blobs);
  std::vector<std::vector<Perturbation>> plans(static_cast<std::size_t>(config.facet_count),
                                               {GaussianNoise{config.noise_sigma}});
  std::vector<std::uint64_t> seeds;
  for (int t = 0; t < config.facet_count; ++t) seeds.push_back(rng.next());
  return make_facet_set(std::move(base), std::move(blobs), std::move(plans), std::move(seeds));
}

ConsensusOutcome run_consensus(const ConsensusConfig& config, std::uint64_t seed) {
  const FacetSet set = consensus_facets(config, seed);
  const GlobalMatchResult global = match_global(set.facets, config.tau);
  ConsensusOutcome out;
  out.purity = identity_purity(global.tracks, set);
  out.tracks = global.tracks.tracks.size();
  for (const auto& track : global.tracks.tracks) {
    if (track.support() < config.min_support) continue;
    const bool blob = std::any_of(track.members.begin(), track.members.end(), [&](const Vertex& v) {
      return set.truth[v.facet][v.feature] != kNoBlob;
    });
    if (blob) ++out.stable_blob_tracks;
  }
  return out;
}

}  // namespace topomatch
