#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scm {

// Dense row-major H x W x C tensor of floats. Channel is the fastest axis.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int height, int width, int channels, float fill = 0.f)
      : h_(height), w_(width), c_(channels) {
    if (height <= 0 || width <= 0 || channels <= 0)
      throw std::invalid_argument("Tensor: dims must be positive");
    data_.assign(static_cast<size_t>(height) * width * channels, fill);
  }

  int height() const { return h_; }
  int width() const { return w_; }
  int channels() const { return c_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float& at(int y, int x, int ch) { return data_[idx(y, x, ch)]; }
  float at(int y, int x, int ch) const { return data_[idx(y, x, ch)]; }

  const float* pixel(int y, int x) const { return &data_[idx(y, x, 0)]; }
  float* pixel(int y, int x) { return &data_[idx(y, x, 0)]; }

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  bool same_shape(const Tensor& other) const {
    return h_ == other.h_ && w_ == other.w_ && c_ == other.c_;
  }

  bool all_finite() const {
    for (float v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  size_t idx(int y, int x, int ch) const {
    return (static_cast<size_t>(y) * w_ + x) * c_ + ch;
  }

  int h_ = 0, w_ = 0, c_ = 0;
  std::vector<float> data_;
};

// 8-bit H x W x C raster (C = 3 for imagery, 1 for masks/labels).
class Raster {
 public:
  Raster() = default;
  Raster(int height, int width, int channels, uint8_t fill = 0)
      : h_(height), w_(width), c_(channels) {
    if (height <= 0 || width <= 0 || channels <= 0)
      throw std::invalid_argument("Raster: dims must be positive");
    data_.assign(static_cast<size_t>(height) * width * channels, fill);
  }

  int height() const { return h_; }
  int width() const { return w_; }
  int channels() const { return c_; }
  bool empty() const { return data_.empty(); }

  uint8_t& at(int y, int x, int ch = 0) { return data_[idx(y, x, ch)]; }
  uint8_t at(int y, int x, int ch = 0) const { return data_[idx(y, x, ch)]; }

  std::vector<uint8_t>& data() { return data_; }
  const std::vector<uint8_t>& data() const { return data_; }

  bool same_dims(const Raster& other) const {
    return h_ == other.h_ && w_ == other.w_ && c_ == other.c_;
  }

 private:
  size_t idx(int y, int x, int ch) const {
    return (static_cast<size_t>(y) * w_ + x) * c_ + ch;
  }

  int h_ = 0, w_ = 0, c_ = 0;
  std::vector<uint8_t> data_;
};

// Binary H x W mask, values restricted to {0,1}.
using Mask = Raster;

inline size_t foreground_count(const Mask& m) {
  size_t n = 0;
  for (uint8_t v : m.data()) n += (v != 0);
  return n;
}

}  // namespace scm
