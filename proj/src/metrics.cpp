#include "topomatch/metrics.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

#include "topomatch/error.hpp"

namespace topomatch {

namespace {

std::size_t count_components(const BinaryMask& mask, int row0, int col0, int rows, int cols,
                             Connectivity connectivity) {
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0);
  std::vector<std::size_t> stack;
  std::size_t components = 0;
  for (std::size_t start = 0; start < seen.size(); ++start) {
    const int r = static_cast<int>(start / static_cast<std::size_t>(cols));
    const int c = static_cast<int>(start % static_cast<std::size_t>(cols));
    if (seen[start] || !mask.at(row0 + r, col0 + c)) continue;
    ++components;
    seen[start] = 1;
    stack.assign(1, start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      for_each_neighbor(cols, rows, p, connectivity, [&](std::size_t q) {
        const int qr = static_cast<int>(q / static_cast<std::size_t>(cols));
        const int qc = static_cast<int>(q % static_cast<std::size_t>(cols));
        if (!seen[q] && mask.at(row0 + qr, col0 + qc)) {
          seen[q] = 1;
          stack.push_back(q);
        }
      });
    }
  }
  return components;
}

std::vector<int> window_starts(int extent, int window, int stride) {
  std::vector<int> starts;
  for (int s = 0;; s += stride) {
    starts.push_back(s);
    if (s + window >= extent) break;
  }
  return starts;
}

bool is_placeholder(const PersistenceDiagram& diagram) {
  return diagram.size() == 1 && diagram[0].birth_value >= 1.0;
}

}  // namespace

std::size_t betti_number(const BinaryMask& mask, Connectivity connectivity) {
  if (mask.size() == 0) return 0;
  return count_components(mask, 0, 0, mask.height(), mask.width(), connectivity);
}

double betti_error(const ScalarField& prediction, const BinaryMask& ground_truth, int window,
                   int stride, double threshold, Connectivity connectivity) {
  if (prediction.width() != ground_truth.width() || prediction.height() != ground_truth.height()) {
    throw InputError("betti_error: prediction and ground truth differ in size");
  }
  if (stride == 0) stride = window;
  if (window <= 0 || stride <= 0) throw InputError("betti_error: window and stride must be positive");
  if (window > std::min(prediction.width(), prediction.height())) {
    throw InputError("betti_error: window " + std::to_string(window) + " exceeds image " +
                     std::to_string(prediction.width()) + "x" +
                     std::to_string(prediction.height()));
  }
  const BinaryMask pred = binarize(prediction, threshold);
  double total = 0.0;
  std::size_t windows = 0;
  for (const int r0 : window_starts(prediction.height(), window, stride)) {
    for (const int c0 : window_starts(prediction.width(), window, stride)) {
      const int rows = std::min(window, prediction.height() - r0);
      const int cols = std::min(window, prediction.width() - c0);
      const auto a = static_cast<long>(count_components(pred, r0, c0, rows, cols, connectivity));
      const auto b =
          static_cast<long>(count_components(ground_truth, r0, c0, rows, cols, connectivity));
      total += static_cast<double>(std::labs(a - b));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

std::size_t matched_feature_error(const ScalarField& prediction, const BinaryMask& ground_truth,
                                  double tau, Connectivity connectivity) {
  if (prediction.width() != ground_truth.width() || prediction.height() != ground_truth.height()) {
    throw InputError("matched_feature_error: prediction and ground truth differ in size");
  }
  const ScalarField gt_field = ground_truth.to_field();
  const FeatureSet a = make_feature_set(prediction, connectivity);
  const FeatureSet b = make_feature_set(gt_field, connectivity);
  const PairMatchResult result = assign_similarity(similarity_matrix(a, b), tau);
  const std::size_t left = is_placeholder(a.diagram) ? 0 : result.unmatched_1.size();
  const std::size_t right = is_placeholder(b.diagram) ? 0 : result.unmatched_2.size();
  return left + right;
}

MetricReport evaluate_metrics(const ScalarField& prediction, const BinaryMask& ground_truth,
                              int window, int stride, double threshold, double tau,
                              Connectivity connectivity) {
  MetricReport report;
  report.window = window;
  report.stride = stride == 0 ? window : stride;
  report.threshold = threshold;
  report.betti_error =
      betti_error(prediction, ground_truth, window, report.stride, threshold, connectivity);
  report.matched_feature_error = matched_feature_error(prediction, ground_truth, tau, connectivity);
  return report;
}

}  // namespace topomatch
