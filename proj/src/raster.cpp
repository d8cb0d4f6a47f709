#include "omg/raster.hpp"

#include <algorithm>
#include <cmath>

#include "omg/types.hpp"

namespace omg {

Raster::Raster(int channels, int height, int width, float fill)
    : channels_(channels), height_(height), width_(width) {
  if (channels <= 0 || height <= 0 || width <= 0)
    throw DataError("raster dimensions must be positive");
  data_.assign(static_cast<std::size_t>(channels) * plane_size(), fill);
}

Raster Raster::plane(int c) const {
  Raster out(1, height_, width_);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(c * plane_size()),
              plane_size(), out.data_.begin());
  return out;
}

namespace {

struct Tap {
  int lo;
  int hi;
  float frac;
};

std::vector<Tap> make_taps(int in, int out) {
  std::vector<Tap> taps(static_cast<std::size_t>(out));
  const double scale = static_cast<double>(in) / out;
  for (int i = 0; i < out; ++i) {
    double src = (i + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const int lo = static_cast<int>(std::floor(src));
    const int hi = std::min(lo + 1, in - 1);
    taps[static_cast<std::size_t>(i)] = {lo, hi, static_cast<float>(src - lo)};
  }
  return taps;
}

}  // namespace

Raster resize_bilinear(const Raster& src, int out_height, int out_width) {
  if (src.empty()) throw DataError("cannot resize an empty raster");
  Raster out(src.channels(), out_height, out_width);
  const auto ty = make_taps(src.height(), out_height);
  const auto tx = make_taps(src.width(), out_width);
  for (int c = 0; c < src.channels(); ++c) {
    for (int y = 0; y < out_height; ++y) {
      const Tap& vy = ty[static_cast<std::size_t>(y)];
      for (int x = 0; x < out_width; ++x) {
        const Tap& vx = tx[static_cast<std::size_t>(x)];
        const float top = src.at(c, vy.lo, vx.lo) * (1 - vx.frac) +
                          src.at(c, vy.lo, vx.hi) * vx.frac;
        const float bot = src.at(c, vy.hi, vx.lo) * (1 - vx.frac) +
                          src.at(c, vy.hi, vx.hi) * vx.frac;
        out.at(c, y, x) = top * (1 - vy.frac) + bot * vy.frac;
      }
    }
  }
  return out;
}

}  // namespace omg
