#pragma once

#include <optional>
#include <vector>

#include "topomatch/field.hpp"

namespace topomatch {

// One 0-dimensional feature. Birth and death are stored in the inverted
// scale g = 1 - f, so the super-level filtration of f becomes a sub-level
// filtration of g and 0 <= birth_value <= death_value <= 1.
struct PersistenceFeature {
  double birth_value = 0.0;
  double death_value = 1.0;
  Pixel birth_pixel;
  std::optional<Pixel> death_pixel;  // absent for essential features
  bool essential = true;

  double persistence() const { return death_value - birth_value; }

  friend bool operator==(const PersistenceFeature&, const PersistenceFeature&) = default;
};

struct PersistenceDiagram {
  int width = 0;
  int height = 0;
  // Sorted by (birth_value, row-major birth pixel index).
  std::vector<PersistenceFeature> features;

  std::size_t size() const { return features.size(); }
  bool empty() const { return features.empty(); }
  const PersistenceFeature& operator[](std::size_t i) const { return features[i]; }

  friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;
};

// A flood-filled region owned by one feature. Stored as sorted row-major
// pixel indices; masks are usually tiny compared with the image.
struct FeatureMask {
  std::size_t feature = 0;
  std::vector<std::size_t> pixels;

  BinaryMask to_binary(int width, int height) const;
};

// Filtration value of a pixel. Every module reads g through this helper so
// threshold tests stay bit-consistent with the stored birth/death values.
inline double filtration_value(double likelihood) { return 1.0 - likelihood; }

// Union-find sweep over pixels in ascending (g, row-major index). Pixels with
// g = 1 (likelihood 0) never enter the filtration, so each connected region of
// positive likelihood carries one essential feature. Zero-persistence pairs
// (plateau pieces) are not reported. An all-zero field yields a single
// essential feature with birth 1 at pixel (0,0).
PersistenceDiagram compute_diagram(const ScalarField& field,
                                   Connectivity connectivity = Connectivity::Eight);

// Connected component of {g < death_value} containing the birth pixel
// (equivalently likelihood > 1 - d). Throws InvariantError if the birth pixel
// itself fails the test.
FeatureMask extract_mask(const ScalarField& field, const PersistenceFeature& feature,
                         Connectivity connectivity = Connectivity::Eight,
                         std::size_t feature_index = 0);

std::vector<FeatureMask> extract_masks(const ScalarField& field, const PersistenceDiagram& diagram,
                                       Connectivity connectivity = Connectivity::Eight);

// persistence_i / max_j persistence_j; all zeros if the maximum is zero.
// Throws InputError on an empty diagram.
std::vector<double> feature_weights(const PersistenceDiagram& diagram);

// Sum of persistence over non-essential features.
double total_finite_persistence(const PersistenceDiagram& diagram);

}  // namespace topomatch
