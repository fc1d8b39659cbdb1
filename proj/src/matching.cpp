#include "topomatch/matching.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "topomatch/error.hpp"
#include "topomatch/parallel.hpp"

namespace topomatch {

namespace {

double pixel_distance(const Pixel& a, const Pixel& b) {
  const double dr = a.row - b.row;
  const double dc = a.col - b.col;
  return std::sqrt(dr * dr + dc * dc);
}

PairMatchResult collect(const Assignment& assignment, const Matrix& similarity, double tau) {
  PairMatchResult result;
  result.threshold = tau;
  std::vector<char> used1(similarity.rows(), 0), used2(similarity.cols(), 0);
  for (const auto& [i, j] : assignment) {
    if (i >= similarity.rows() || j >= similarity.cols()) continue;  // dummy padding
    const double s = similarity(i, j);
    if (s > tau) {
      result.matches.push_back({i, j, s});
      used1[i] = used2[j] = 1;
    }
  }
  std::sort(result.matches.begin(), result.matches.end(),
            [](const Match& a, const Match& b) { return a.i < b.i; });
  for (std::size_t i = 0; i < used1.size(); ++i) {
    if (!used1[i]) result.unmatched_1.push_back(i);
  }
  for (std::size_t j = 0; j < used2.size(); ++j) {
    if (!used2[j]) result.unmatched_2.push_back(j);
  }
  return result;
}

Matrix padded_cost(const Matrix& similarity, const std::vector<std::size_t>& rows,
                   const std::vector<std::size_t>& cols) {
  const std::size_t k = std::max(rows.size(), cols.size());
  Matrix cost(k, k, 1.0);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b) cost(a, b) = 1.0 - similarity(rows[a], cols[b]);
  }
  return cost;
}

}  // namespace

FeatureSet make_feature_set(const ScalarField& field, Connectivity connectivity,
                            std::vector<double> weights) {
  FeatureSet set;
  set.diagram = compute_diagram(field, connectivity);
  if (weights.size() != set.diagram.size()) {
    throw InputError("weight count does not match the diagram");
  }
  set.masks = extract_masks(field, set.diagram, connectivity);
  set.weights = std::move(weights);
  return set;
}

FeatureSet make_feature_set(const ScalarField& field, Connectivity connectivity) {
  FeatureSet set;
  set.diagram = compute_diagram(field, connectivity);
  set.masks = extract_masks(field, set.diagram, connectivity);
  set.weights = feature_weights(set.diagram);
  return set;
}

Matrix similarity_matrix(const FeatureSet& first, const FeatureSet& second) {
  if (first.diagram.width != second.diagram.width ||
      first.diagram.height != second.diagram.height) {
    throw InputError("cannot compare fields of different dimensions");
  }
  const std::size_t n1 = first.diagram.size();
  const std::size_t n2 = second.diagram.size();
  Matrix similarity(n1, n2, 0.0);
  if (n1 == 0 || n2 == 0) return similarity;

  double d_max = 0.0;
  for (const auto& a : first.diagram.features) {
    for (const auto& b : second.diagram.features) {
      d_max = std::max(d_max, pixel_distance(a.birth_pixel, b.birth_pixel));
    }
  }

  // pixel -> features of `second` whose mask contains it (CSR layout).
  const std::size_t pixels = static_cast<std::size_t>(first.diagram.width) *
                             static_cast<std::size_t>(first.diagram.height);
  std::vector<std::size_t> offsets(pixels + 1, 0);
  for (const auto& mask : second.masks) {
    for (const std::size_t p : mask.pixels) ++offsets[p + 1];
  }
  for (std::size_t p = 0; p < pixels; ++p) offsets[p + 1] += offsets[p];
  std::vector<std::size_t> owners(offsets.back());
  {
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t j = 0; j < n2; ++j) {
      for (const std::size_t p : second.masks[j].pixels) owners[cursor[p]++] = j;
    }
  }

  parallel_for(n1, [&](std::size_t i) {
    std::vector<std::size_t> overlap(n2, 0);
    std::vector<std::size_t> touched;
    for (const std::size_t p : first.masks[i].pixels) {
      for (std::size_t k = offsets[p]; k < offsets[p + 1]; ++k) {
        const std::size_t j = owners[k];
        if (overlap[j]++ == 0) touched.push_back(j);
      }
    }
    for (const std::size_t j : touched) {
      const double inter = static_cast<double>(overlap[j]);
      const double uni =
          static_cast<double>(first.masks[i].pixels.size() + second.masks[j].pixels.size()) -
          inter;
      const double iou = inter / uni;
      const double proximity =
          d_max > 0.0 ? 1.0 - pixel_distance(first.diagram[i].birth_pixel,
                                             second.diagram[j].birth_pixel) /
                                  d_max
                      : 1.0;
      similarity(i, j) = first.weights[i] * second.weights[j] * iou * proximity;
    }
  });
  return similarity;
}

Matrix similarity_matrix(const ScalarField& field1, const PersistenceDiagram& diag1,
                         const ScalarField& field2, const PersistenceDiagram& diag2,
                         const std::vector<double>& weights1, const std::vector<double>& weights2,
                         Connectivity connectivity) {
  if (field1.width() != field2.width() || field1.height() != field2.height()) {
    throw InputError("cannot compare fields of different dimensions");
  }
  if (weights1.size() != diag1.size() || weights2.size() != diag2.size()) {
    throw InputError("weights do not correspond to diagrams");
  }
  FeatureSet a{diag1, extract_masks(field1, diag1, connectivity), weights1};
  FeatureSet b{diag2, extract_masks(field2, diag2, connectivity), weights2};
  return similarity_matrix(a, b);
}

PairMatchResult assign_similarity_dense(const Matrix& similarity, double tau) {
  if (similarity.empty()) return collect({}, similarity, tau);
  std::vector<std::size_t> rows(similarity.rows()), cols(similarity.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  return collect(hungarian_assign(padded_cost(similarity, rows, cols)), similarity, tau);
}

PairMatchResult assign_similarity(const Matrix& similarity, double tau) {
  const std::size_t n1 = similarity.rows();
  const std::size_t n2 = similarity.cols();
  // Bipartite components over positive entries. Vertices 0..n1-1 are rows,
  // n1..n1+n2-1 columns.
  std::vector<std::vector<std::size_t>> adjacency(n1 + n2);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      if (similarity(i, j) > 0.0) {
        adjacency[i].push_back(n1 + j);
        adjacency[n1 + j].push_back(i);
      }
    }
  }
  Assignment assignment;
  std::vector<char> seen(n1 + n2, 0);
  for (std::size_t start = 0; start < n1; ++start) {
    if (seen[start] || adjacency[start].empty()) continue;
    std::vector<std::size_t> rows, cols, queue{start};
    seen[start] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t v = queue[head];
      (v < n1 ? rows : cols).push_back(v < n1 ? v : v - n1);
      for (const std::size_t w : adjacency[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
    std::sort(rows.begin(), rows.end());
    std::sort(cols.begin(), cols.end());
    for (const auto& [a, b] : hungarian_assign(padded_cost(similarity, rows, cols))) {
      if (a < rows.size() && b < cols.size()) assignment.emplace_back(rows[a], cols[b]);
    }
  }
  return collect(assignment, similarity, tau);
}

PairMatchResult match_pair(const ScalarField& field1, const ScalarField& field2, double tau,
                           Connectivity connectivity) {
  if (field1.width() != field2.width() || field1.height() != field2.height()) {
    throw InputError("match_pair: fields have different dimensions (" +
                     std::to_string(field1.width()) + "x" + std::to_string(field1.height()) +
                     " vs " + std::to_string(field2.width()) + "x" +
                     std::to_string(field2.height()) + ")");
  }
  const FeatureSet a = make_feature_set(field1, connectivity);
  const FeatureSet b = make_feature_set(field2, connectivity);
  return assign_similarity(similarity_matrix(a, b), tau);
}

PairMatchResult wasserstein_match(const PersistenceDiagram& diag1,
                                  const PersistenceDiagram& diag2) {
  const std::size_t n1 = diag1.size();
  const std::size_t n2 = diag2.size();
  PairMatchResult result;
  if (n1 + n2 == 0) return result;

  constexpr double kForbidden = 1e6;
  auto to_diagonal = [](const PersistenceFeature& f) {
    const double half = (f.death_value - f.birth_value) / 2.0;
    return half * half * 2.0;
  };
  auto pair_cost = [&](std::size_t i, std::size_t j) {
    const double db = diag1[i].birth_value - diag2[j].birth_value;
    const double dd = diag1[i].death_value - diag2[j].death_value;
    return db * db + dd * dd;
  };

  const std::size_t k = n1 + n2;
  Matrix cost(k, k, 0.0);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) cost(i, j) = pair_cost(i, j);
    for (std::size_t l = 0; l < n1; ++l) cost(i, n2 + l) = l == i ? to_diagonal(diag1[i]) : kForbidden;
  }
  for (std::size_t l = 0; l < n2; ++l) {
    for (std::size_t j = 0; j < n2; ++j) cost(n1 + l, j) = l == j ? to_diagonal(diag2[j]) : kForbidden;
  }

  std::vector<char> used1(n1, 0), used2(n2, 0);
  for (const auto& [r, c] : hungarian_assign(cost)) {
    if (r < n1 && c < n2) {
      result.matches.push_back({r, c, pair_cost(r, c)});
      used1[r] = used2[c] = 1;
    }
  }
  for (std::size_t i = 0; i < n1; ++i) {
    if (!used1[i]) result.unmatched_1.push_back(i);
  }
  for (std::size_t j = 0; j < n2; ++j) {
    if (!used2[j]) result.unmatched_2.push_back(j);
  }
  return result;
}

}  // namespace topomatch
