#pragma once

#include <cstddef>
#include <vector>

namespace omg {

// Planar (channel-major, then row-major) float image.
class Raster {
 public:
  Raster() = default;
  Raster(int channels, int height, int width, float fill = 0.0f);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  bool empty() const { return data_.empty(); }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  float& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  float at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  // Single-channel copy of plane c.
  Raster plane(int c) const;

  bool operator==(const Raster&) const = default;

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

// Bilinear resampling with half-pixel centers and edge clamping.
Raster resize_bilinear(const Raster& src, int out_height, int out_width);

}  // namespace omg
