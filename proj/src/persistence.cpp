#include "topomatch/persistence.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "topomatch/error.hpp"

namespace topomatch {

namespace {

constexpr std::size_t kUnset = static_cast<std::size_t>(-1);

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n, kUnset) {}

  bool active(std::size_t x) const { return parent_[x] != kUnset; }
  void activate(std::size_t x) { parent_[x] = x; }

  std::size_t find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::size_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  void attach(std::size_t child_root, std::size_t parent_root) { parent_[child_root] = parent_root; }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

PersistenceDiagram compute_diagram(const ScalarField& field, Connectivity connectivity) {
  PersistenceDiagram diagram{field.width(), field.height(), {}};
  const std::size_t n = field.size();
  if (n == 0) return diagram;

  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = filtration_value(field[i]);

  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (g[i] < 1.0) order.push_back(i);
  }
  if (order.empty()) {
    diagram.features.push_back({1.0, 1.0, Pixel{0, 0}, std::nullopt, true});
    return diagram;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return g[a] < g[b] || (g[a] == g[b] && a < b);
  });

  // For each root: the pixel that gave birth to its component. Pixels are
  // processed in (g, index) order, so comparing birth pixels by that same
  // order implements the elder rule with the row-major tie-break.
  std::vector<std::size_t> birth_of(n, kUnset);
  auto elder = [&](std::size_t a, std::size_t b) {
    return g[a] < g[b] || (g[a] == g[b] && a < b);
  };

  DisjointSet sets(n);
  std::vector<std::size_t> roots;
  for (const std::size_t p : order) {
    roots.clear();
    for_each_neighbor(field.width(), field.height(), p, connectivity, [&](std::size_t q) {
      if (!sets.active(q)) return;
      const std::size_t r = sets.find(q);
      if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    });
    sets.activate(p);
    if (roots.empty()) {
      birth_of[p] = p;
      continue;
    }
    const std::size_t survivor = *std::min_element(
        roots.begin(), roots.end(),
        [&](std::size_t a, std::size_t b) { return elder(birth_of[a], birth_of[b]); });
    for (const std::size_t r : roots) {
      if (r == survivor) continue;
      const std::size_t born = birth_of[r];
      if (g[born] < g[p]) {
        diagram.features.push_back(
            {g[born], g[p], field.pixel(born), field.pixel(p), false});
      }
      sets.attach(r, survivor);
    }
    sets.attach(p, survivor);
  }

  for (const std::size_t p : order) {
    if (sets.find(p) == p) {
      diagram.features.push_back({g[birth_of[p]], 1.0, field.pixel(birth_of[p]), std::nullopt, true});
    }
  }

  const int width = field.width();
  std::sort(diagram.features.begin(), diagram.features.end(),
            [width](const PersistenceFeature& a, const PersistenceFeature& b) {
              if (a.birth_value != b.birth_value) return a.birth_value < b.birth_value;
              const long ia = static_cast<long>(a.birth_pixel.row) * width + a.birth_pixel.col;
              const long ib = static_cast<long>(b.birth_pixel.row) * width + b.birth_pixel.col;
              return ia < ib;
            });
  return diagram;
}

BinaryMask FeatureMask::to_binary(int width, int height) const {
  BinaryMask mask(width, height);
  for (const std::size_t p : pixels) mask.set(p, true);
  return mask;
}

FeatureMask extract_mask(const ScalarField& field, const PersistenceFeature& feature,
                         Connectivity connectivity, std::size_t feature_index) {
  if (!field.contains(feature.birth_pixel)) {
    throw InvariantError("birth pixel outside the field");
  }
  const double death = feature.death_value;
  // The all-zero placeholder (b = d = 1) owns the whole g <= 1 region.
  const bool degenerate = feature.birth_value >= 1.0;
  auto inside = [&](std::size_t p) {
    const double g = filtration_value(field[p]);
    return degenerate ? g <= death : g < death;
  };

  const std::size_t seed = field.index(feature.birth_pixel.row, feature.birth_pixel.col);
  if (!inside(seed)) {
    throw InvariantError("birth pixel (" + std::to_string(feature.birth_pixel.row) + "," +
                         std::to_string(feature.birth_pixel.col) +
                         ") does not exceed the feature's flood-fill threshold");
  }

  FeatureMask mask{feature_index, {}};
  std::vector<std::uint8_t> seen(field.size(), 0);
  std::vector<std::size_t> stack{seed};
  seen[seed] = 1;
  while (!stack.empty()) {
    const std::size_t p = stack.back();
    stack.pop_back();
    mask.pixels.push_back(p);
    for_each_neighbor(field.width(), field.height(), p, connectivity, [&](std::size_t q) {
      if (!seen[q] && inside(q)) {
        seen[q] = 1;
        stack.push_back(q);
      }
    });
  }
  std::sort(mask.pixels.begin(), mask.pixels.end());
  return mask;
}

std::vector<FeatureMask> extract_masks(const ScalarField& field, const PersistenceDiagram& diagram,
                                       Connectivity connectivity) {
  std::vector<FeatureMask> masks;
  masks.reserve(diagram.size());
  for (std::size_t i = 0; i < diagram.size(); ++i) {
    masks.push_back(extract_mask(field, diagram[i], connectivity, i));
  }
  return masks;
}

std::vector<double> feature_weights(const PersistenceDiagram& diagram) {
  if (diagram.empty()) throw InputError("feature_weights needs a non-empty diagram");
  double max_persistence = 0.0;
  for (const auto& f : diagram.features) max_persistence = std::max(max_persistence, f.persistence());
  std::vector<double> weights(diagram.size(), 0.0);
  if (max_persistence > 0.0) {
    for (std::size_t i = 0; i < diagram.size(); ++i) {
      weights[i] = diagram[i].persistence() / max_persistence;
    }
  }
  return weights;
}

double total_finite_persistence(const PersistenceDiagram& diagram) {
  double sum = 0.0;
  for (const auto& f : diagram.features) {
    if (!f.essential) sum += f.persistence();
  }
  return sum;
}

}  // namespace topomatch
