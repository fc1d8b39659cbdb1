#include "topomatch/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "topomatch/error.hpp"

namespace topomatch {

namespace {

void check_shape(int width, int height, std::size_t length) {
  if (width <= 0 || height <= 0) {
    throw InputError("field dimensions must be positive, got " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
  if (length != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InputError("expected " + std::to_string(width) + "x" + std::to_string(height) +
                     " values, got " + std::to_string(length));
  }
}

}  // namespace

ScalarField::ScalarField(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  check_shape(width_, height_, values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InputError("value " + std::to_string(v) + " at index " + std::to_string(i) +
                       " is outside [0,1]");
    }
  }
}

ScalarField ScalarField::constant(int width, int height, double value) {
  return ScalarField(width, height,
                     std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                             static_cast<std::size_t>(std::max(height, 0)),
                                         value));
}

ScalarField ScalarField::with_value(std::size_t index, double value) const {
  std::vector<double> copy = values_;
  copy.at(index) = value;
  return ScalarField(width_, height_, std::move(copy));
}

ScalarField ScalarField::transposed() const {
  std::vector<double> out(values_.size());
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      out[static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) +
          static_cast<std::size_t>(r)] = at(r, c);
    }
  }
  return ScalarField(height_, width_, std::move(out));
}

BinaryMask::BinaryMask(int width, int height)
    : BinaryMask(width, height,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                           static_cast<std::size_t>(std::max(height, 0)))) {}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  check_shape(width_, height_, bits_.size());
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::transposed() const {
  BinaryMask out(height_, width_);
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) out.set(c, r, at(r, c));
  }
  return out;
}

BinaryMask BinaryMask::rotated90() const {
  // Clockwise: (r, c) -> (c, H - 1 - r).
  BinaryMask out(height_, width_);
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) out.set(c, height_ - 1 - r, at(r, c));
  }
  return out;
}

ScalarField BinaryMask::to_field() const {
  std::vector<double> values(bits_.size());
  std::transform(bits_.begin(), bits_.end(), values.begin(),
                 [](std::uint8_t b) { return b ? 1.0 : 0.0; });
  return ScalarField(width_, height_, std::move(values));
}

BinaryMask binarize(const ScalarField& field, double threshold) {
  std::vector<std::uint8_t> bits(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) bits[i] = field[i] > threshold ? 1 : 0;
  return BinaryMask(field.width(), field.height(), std::move(bits));
}

}  // namespace topomatch
