#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace topomatch {

enum class Connectivity { Four, Eight };

struct Pixel {
  int row = 0;
  int col = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

// Row-major 2D grid of likelihoods in [0,1].
class ScalarField {
 public:
  ScalarField() = default;
  // Throws InputError if the size does not match or a value leaves [0,1].
  ScalarField(int width, int height, std::vector<double> values);
  static ScalarField constant(int width, int height, double value);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double at(int row, int col) const { return values_[index(row, col)]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }
  Pixel pixel(std::size_t index) const {
    return {static_cast<int>(index / static_cast<std::size_t>(width_)),
            static_cast<int>(index % static_cast<std::size_t>(width_))};
  }
  bool contains(Pixel p) const {
    return p.row >= 0 && p.col >= 0 && p.row < height_ && p.col < width_;
  }

  // Returns a copy with one value replaced. Used by finite-difference checks.
  ScalarField with_value(std::size_t index, double value) const;
  ScalarField transposed() const;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }

  bool at(int row, int col) const { return bits_[index(row, col)] != 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  void set(int row, int col, bool value) { set(index(row, col), value); }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t count() const;

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  BinaryMask transposed() const;
  BinaryMask rotated90() const;
  // 0/1-valued field with the same shape.
  ScalarField to_field() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// bit p = value p > threshold (strict).
BinaryMask binarize(const ScalarField& field, double threshold = 0.5);

// Visits the in-bounds neighbours of `index` on a width x height grid.
template <typename Fn>
void for_each_neighbor(int width, int height, std::size_t index, Connectivity conn, Fn&& fn) {
  const int row = static_cast<int>(index / static_cast<std::size_t>(width));
  const int col = static_cast<int>(index % static_cast<std::size_t>(width));
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      if (conn == Connectivity::Four && dr != 0 && dc != 0) continue;
      const int r = row + dr;
      const int c = col + dc;
      if (r < 0 || c < 0 || r >= height || c >= width) continue;
      fn(static_cast<std::size_t>(r) * static_cast<std::size_t>(width) +
         static_cast<std::size_t>(c));
    }
  }
}

}  // namespace topomatch
