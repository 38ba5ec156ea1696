#pragma once

#include "rh/error.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rh {

// Row-major 2D grid.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw Error(ErrorCode::InvalidArgument, "negative raster size");
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }

  T& at(int x, int y) {
    check(x, y);
    return (*this)(x, y);
  }
  const T& at(int x, int y) const {
    check(x, y);
    return (*this)(x, y);
  }

  std::span<T> row(int y) { return {data_.data() + index(0, y), static_cast<std::size_t>(width_)}; }
  std::span<const T> row(int y) const {
    return {data_.data() + index(0, y), static_cast<std::size_t>(width_)};
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool same_shape(int w, int h) const { return width_ == w && height_ == h; }
  template <typename U>
  bool same_shape(const Raster<U>& other) const {
    return same_shape(other.width(), other.height());
  }

  bool operator==(const Raster&) const = default;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }
  void check(int x, int y) const {
    if (!in_bounds(x, y)) throw Error(ErrorCode::OutOfBounds, "pixel access outside raster");
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

// Grayscale intensities. maxval records the sensor range (4095 for 12-bit data)
// and is what PGM output writes back.
class IntensityImage : public Raster<double> {
 public:
  IntensityImage() = default;
  IntensityImage(int width, int height, double fill = 0.0, int maxval = 4095)
      : Raster<double>(width, height, fill), maxval_(maxval) {}

  int maxval() const { return maxval_; }
  void set_maxval(int maxval) { maxval_ = maxval; }

 private:
  int maxval_ = 4095;
};

// Invalid entries hold NaN.
using DisparityMap = Raster<float>;

inline constexpr float kInvalidDisparity = std::numeric_limits<float>::quiet_NaN();
inline bool is_valid_disparity(float d) { return std::isfinite(d) && d > 0.0f; }

// 0 = unlabeled, 1 = free space, >= 2 = obstacle instance.
using LabelMap = Raster<std::uint16_t>;
inline constexpr std::uint16_t kUnlabeled = 0;
inline constexpr std::uint16_t kFreeSpace = 1;
inline bool is_obstacle_label(std::uint16_t id) { return id >= 2; }

using Mask = Raster<std::uint8_t>;

}  // namespace rh
