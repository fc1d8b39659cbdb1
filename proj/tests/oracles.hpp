#pragma once

// Brute-force reference implementations used only by tests. None of these
// share code paths with the library routines they check.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "topomatch/field.hpp"
#include "topomatch/global_match.hpp"
#include "topomatch/hungarian.hpp"
#include "topomatch/persistence.hpp"
#include "topomatch/synth.hpp"

namespace topomatch::oracle {

inline std::vector<std::size_t> neighbours(int w, int h, std::size_t p, Connectivity conn) {
  std::vector<std::size_t> out;
  const int r = static_cast<int>(p) / w;
  const int c = static_cast<int>(p) % w;
  const int d8[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};
  for (const auto& d : d8) {
    if (conn == Connectivity::Four && d[0] != 0 && d[1] != 0) continue;
    const int rr = r + d[0], cc = c + d[1];
    if (rr >= 0 && cc >= 0 && rr < h && cc < w) out.push_back(static_cast<std::size_t>(rr * w + cc));
  }
  return out;
}

// Labels connected components of `present` by repeated BFS. Label -1 = absent.
inline std::vector<int> label(int w, int h, const std::vector<char>& present, Connectivity conn) {
  std::vector<int> labels(present.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < present.size(); ++s) {
    if (!present[s] || labels[s] >= 0) continue;
    std::vector<std::size_t> queue{s};
    labels[s] = next;
    for (std::size_t k = 0; k < queue.size(); ++k) {
      for (auto q : neighbours(w, h, queue[k], conn)) {
        if (present[q] && labels[q] < 0) {
          labels[q] = next;
          queue.push_back(q);
        }
      }
    }
    ++next;
  }
  return labels;
}

// Threshold sweep with one pixel added per step in ascending (g, index)
// order. Every step relabels the whole sub-level set from scratch. A
// component's identity is its earliest pixel in sweep order (elder rule); when
// a new pixel touches several old components all but the earliest die there.
inline PersistenceDiagram sweep_diagram(const ScalarField& f, Connectivity conn) {
  const int w = f.width(), h = f.height();
  const std::size_t n = f.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = 1.0 - f[i];
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (g[i] < 1.0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return g[a] < g[b]; });
  std::vector<std::size_t> rank(n, n);
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;

  PersistenceDiagram d{w, h, {}};
  auto pixel = [&](std::size_t p) { return Pixel{static_cast<int>(p) / w, static_cast<int>(p) % w}; };
  if (order.empty()) {
    d.features.push_back({1.0, 1.0, {0, 0}, std::nullopt, true});
    return d;
  }

  std::vector<char> present(n, 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t p = order[k];
    const auto labels = label(w, h, present, conn);
    // earliest pixel of every old component adjacent to p
    std::set<int> touching;
    for (auto q : neighbours(w, h, p, conn)) {
      if (labels[q] >= 0) touching.insert(labels[q]);
    }
    std::vector<std::size_t> identities;
    for (int lab : touching) {
      std::size_t best = n;
      for (std::size_t q = 0; q < n; ++q) {
        if (labels[q] == lab && (best == n || rank[q] < rank[best])) best = q;
      }
      identities.push_back(best);
    }
    std::sort(identities.begin(), identities.end(), [&](auto a, auto b) { return rank[a] < rank[b]; });
    for (std::size_t m = 1; m < identities.size(); ++m) {
      const std::size_t born = identities[m];
      if (g[born] < g[p]) d.features.push_back({g[born], g[p], pixel(born), pixel(p), false});
    }
    present[p] = 1;
  }
  const auto labels = label(w, h, present, conn);
  std::map<int, std::size_t> earliest;
  for (std::size_t q : order) {
    if (!earliest.count(labels[q])) earliest[labels[q]] = q;
  }
  for (const auto& [lab, q] : earliest) d.features.push_back({g[q], 1.0, pixel(q), std::nullopt, true});
  std::sort(d.features.begin(), d.features.end(), [&](const auto& a, const auto& b) {
    if (a.birth_value != b.birth_value) return a.birth_value < b.birth_value;
    return a.birth_pixel.row * w + a.birth_pixel.col < b.birth_pixel.row * w + b.birth_pixel.col;
  });
  return d;
}

// Minimum over all injections of the smaller side into the larger.
inline double brute_force_assignment(const Matrix& cost) {
  const bool transpose = cost.rows() > cost.cols();
  const Matrix m = transpose ? cost.transposed() : cost;
  const std::size_t n = m.rows(), k = m.cols();
  if (n == 0 || k == 0) return 0.0;
  std::vector<std::size_t> cols(k);
  std::iota(cols.begin(), cols.end(), 0);
  double best = 0.0;
  bool first = true;
  // Permutations of all columns cover every injection (prefix of length n).
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) total += m(r, cols[r]);
    if (first || total < best) best = total;
    first = false;
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

using Partition = std::set<std::set<Vertex>>;

inline Partition partition_of(const GlobalTracks& tracks) {
  Partition p;
  for (const auto& t : tracks.tracks) p.insert(std::set<Vertex>(t.members.begin(), t.members.end()));
  return p;
}

inline Partition union_find_partition(const FacetGraph& graph) {
  const auto vertices = graph.vertices();
  std::map<Vertex, std::size_t> id;
  for (std::size_t k = 0; k < vertices.size(); ++k) id[vertices[k]] = k;
  std::vector<std::size_t> parent(vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : graph.edges) parent[find(id[e.a])] = find(id[e.b]);
  std::map<std::size_t, std::set<Vertex>> groups;
  for (std::size_t k = 0; k < vertices.size(); ++k) groups[find(k)].insert(vertices[k]);
  Partition p;
  for (auto& [root, members] : groups) p.insert(members);
  return p;
}

// Boolean reachability closure (Warshall), then groups by reachable set.
inline Partition closure_partition(const FacetGraph& graph) {
  const auto vertices = graph.vertices();
  const std::size_t n = vertices.size();
  std::map<Vertex, std::size_t> id;
  for (std::size_t k = 0; k < n; ++k) id[vertices[k]] = k;
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t k = 0; k < n; ++k) reach[k][k] = 1;
  for (const auto& e : graph.edges) reach[id[e.a]][id[e.b]] = reach[id[e.b]][id[e.a]] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = 1;
      }
    }
  }
  Partition p;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<Vertex> s;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j]) s.insert(vertices[j]);
    }
    p.insert(s);
  }
  return p;
}

// Two-pass equivalence-table labeling, counting distinct roots.
inline std::size_t two_pass_components(const BinaryMask& mask, Connectivity conn) {
  const int w = mask.width(), h = mask.height();
  std::vector<int> lab(static_cast<std::size_t>(w * h), 0);
  std::vector<int> parent{0};
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      std::vector<int> prior;
      const int offs[4][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}};
      for (const auto& o : offs) {
        if (conn == Connectivity::Four && o[0] != 0 && o[1] != 0) continue;
        const int rr = r + o[0], cc = c + o[1];
        if (rr < 0 || cc < 0 || cc >= w) continue;
        if (const int l = lab[static_cast<std::size_t>(rr * w + cc)]) prior.push_back(l);
      }
      int& here = lab[static_cast<std::size_t>(r * w + c)];
      if (prior.empty()) {
        here = static_cast<int>(parent.size());
        parent.push_back(here);
      } else {
        int root = find(prior[0]);
        for (int l : prior) root = std::min(root, find(l));
        for (int l : prior) parent[find(l)] = root;
        here = root;
      }
    }
  }
  std::set<int> roots;
  for (int l : lab) {
    if (l) roots.insert(find(l));
  }
  return roots.size();
}

// Random field with values on the 0.1 grid.
inline ScalarField grid_field(int w, int h, SplitMix64& rng) {
  std::vector<double> v(static_cast<std::size_t>(w * h));
  for (auto& x : v) x = static_cast<double>(rng.below(11)) / 10.0;
  return ScalarField(w, h, std::move(v));
}

// Random field whose values are distinct and at least `gap` apart, so small
// perturbations never reorder pixels.
inline ScalarField separated_field(int w, int h, double gap, SplitMix64& rng) {
  const std::size_t n = static_cast<std::size_t>(w * h);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  // Levels gap, 2 gap, ... keep every value strictly inside (0, 1).
  const double span = 1.0 - 2.0 * gap;
  const double step = std::max(gap, span / static_cast<double>(n));
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[perm[i]] = gap + step * static_cast<double>(i);
  return ScalarField(w, h, std::move(v));
}

}  // namespace topomatch::oracle
