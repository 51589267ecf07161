#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "planarmvs/errors.hpp"

namespace planarmvs {

// Dense row-major raster of T.  (x, y) with x in [0, width), y in [0, height).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, const T &fill = T())
      : width_(checked_dim(width)), height_(checked_dim(height)),
        data_(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  T &at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T &at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  T *data() { return data_.data(); }
  const T *data() const { return data_.data(); }

  T *row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_; }
  const T *row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }

  void fill(const T &v) { std::fill(data_.begin(), data_.end(), v); }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

 private:
  static int checked_dim(int v) {
    if (v < 0) throw ValidationError("Grid: negative dimensions");
    return v;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

}  // namespace planarmvs
