#pragma once

#include <cstddef>

#include "topomatch/field.hpp"
#include "topomatch/matching.hpp"

namespace topomatch {

struct MetricReport {
  double betti_error = 0.0;
  std::size_t matched_feature_error = 0;
  int window = 0;
  int stride = 0;
  double threshold = 0.5;
};

// Connected components of true pixels.
std::size_t betti_number(const BinaryMask& mask, Connectivity connectivity = Connectivity::Eight);

// Mean over windows of |b0(pred) - b0(gt)|. Windows start at multiples of
// `stride` and the last one in each axis may be cut by the border. Throws
// InputError if the window is larger than the image.
double betti_error(const ScalarField& prediction, const BinaryMask& ground_truth, int window = 256,
                   int stride = 0, double threshold = 0.5,
                   Connectivity connectivity = Connectivity::Eight);

// Unmatched features on both sides after MATCH-Pair against the 0/1 ground
// truth field. Not equivalent to Betti Matching Error. The placeholder
// feature of an all-zero field is not counted.
std::size_t matched_feature_error(const ScalarField& prediction, const BinaryMask& ground_truth,
                                  double tau = kDefaultTauPrimary,
                                  Connectivity connectivity = Connectivity::Eight);

MetricReport evaluate_metrics(const ScalarField& prediction, const BinaryMask& ground_truth,
                              int window, int stride, double threshold,
                              double tau = kDefaultTauPrimary,
                              Connectivity connectivity = Connectivity::Eight);

}  // namespace topomatch
