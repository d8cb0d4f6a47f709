#include "omg/motion_raster.hpp"

#include <algorithm>
#include <cmath>

#include "omg/geometry.hpp"

namespace omg {

PixelRect pixel_rect(const BoundingBox& box) {
  return {static_cast<int>(std::lround(box.x)), static_cast<int>(std::lround(box.y)),
          static_cast<int>(std::lround(box.w)), static_cast<int>(std::lround(box.h))};
}

Raster composite_foreground(const std::vector<BoundingBox>& boxes,
                            const std::vector<Raster>& crops, FrameSize canvas) {
  if (crops.empty()) throw DataError("no crops to composite");
  if (crops.size() != boxes.size())
    throw DataError("crop count " + std::to_string(crops.size()) +
                    " does not match kept box count " + std::to_string(boxes.size()));
  Raster out(3, canvas.height, canvas.width);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const PixelRect r = pixel_rect(boxes[i]);
    const Raster& crop = crops[i];
    if (crop.channels() != 3 || crop.width() != r.w || crop.height() != r.h)
      throw DataError("crop " + std::to_string(i) + " does not match its box size");
    const int y0 = std::max(r.y, 0);
    const int y1 = std::min(r.y + r.h, canvas.height);
    const int x0 = std::max(r.x, 0);
    const int x1 = std::min(r.x + r.w, canvas.width);
    for (int c = 0; c < 3; ++c)
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) out.at(c, y, x) = crop.at(c, y - r.y, x - r.x);
  }
  return out;
}

Raster composite_foreground(const Track& track, const std::vector<Raster>& crops,
                            FrameSize canvas, double threshold) {
  std::vector<BoundingBox> boxes;
  for (std::size_t i : filter_overlapping_boxes(track, threshold))
    boxes.push_back(track.frames[i].box);
  return composite_foreground(boxes, crops, canvas);
}

namespace {

// Squared-distance test against a segment, using only products and sums so
// that small integer / half-integer inputs compare exactly.
bool near_segment(double px, double py, double ax, double ay, double bx, double by,
                  double r2) {
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  const double apx = px - ax;
  const double apy = py - ay;
  const double dot = apx * dx + apy * dy;
  if (len2 == 0 || dot <= 0) return apx * apx + apy * apy <= r2;
  if (dot >= len2) {
    const double bpx = px - bx;
    const double bpy = py - by;
    return bpx * bpx + bpy * bpy <= r2;
  }
  const double cross = apx * dy - apy * dx;
  return cross * cross <= r2 * len2;
}

}  // namespace

Raster rasterize_trajectory(const std::vector<BoundingBox>& boxes,
                            FrameSize canvas, double thickness) {
  if (boxes.empty()) throw DataError("empty trajectory");
  if (!(thickness >= 1)) throw DataError("line thickness must be >= 1");
  Raster mask(1, canvas.height, canvas.width);
  const double r = thickness / 2;
  const double r2 = r * r;
  auto stamp = [&](const BoundingBox& a, const BoundingBox& b) {
    const double ax = a.center_x(), ay = a.center_y();
    const double bx = b.center_x(), by = b.center_y();
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - r)));
    const int x1 = std::min(canvas.width - 1, static_cast<int>(std::ceil(std::max(ax, bx) + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - r)));
    const int y1 = std::min(canvas.height - 1, static_cast<int>(std::ceil(std::max(ay, by) + r)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (near_segment(x, y, ax, ay, bx, by, r2)) mask.at(0, y, x) = 1.0f;
  };
  if (boxes.size() == 1) stamp(boxes[0], boxes[0]);
  for (std::size_t i = 1; i < boxes.size(); ++i) stamp(boxes[i - 1], boxes[i]);
  return mask;
}

Raster rasterize_trajectory(const Track& track, FrameSize canvas, double thickness) {
  std::vector<BoundingBox> boxes;
  for (const auto& f : track.frames) boxes.push_back(f.box);
  return rasterize_trajectory(boxes, canvas, thickness);
}

Raster build_motion_map(const Track& track, const std::vector<Raster>& crops,
                        const MotionMapOptions& options) {
  const auto kept = filter_overlapping_boxes(track, options.overlap_threshold);
  std::vector<BoundingBox> boxes;
  for (std::size_t i : kept) boxes.push_back(track.frames[i].box);
  const FrameSize native = track.frame_size;

  Raster foreground;
  if (crops.empty()) {
    foreground = Raster(3, native.height, native.width);
  } else {
    if (crops.size() != track.frames.size())
      throw DataError("track '" + track.track_id + "': expected one crop per frame");
    std::vector<Raster> kept_crops;
    for (std::size_t i : kept) kept_crops.push_back(crops[i]);
    foreground = composite_foreground(boxes, kept_crops, native);
  }
  const Raster line = rasterize_trajectory(boxes, native, options.thickness);

  const Raster fg = resize_bilinear(foreground, options.out_height, options.out_width);
  const Raster ln = resize_bilinear(line, options.out_height, options.out_width);
  Raster out(4, options.out_height, options.out_width);
  auto& dst = out.data();
  std::copy(fg.data().begin(), fg.data().end(), dst.begin());
  std::copy(ln.data().begin(), ln.data().end(),
            dst.begin() + static_cast<std::ptrdiff_t>(3 * out.plane_size()));
  for (float& v : dst) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

std::string to_pgm(const Raster& plane) {
  std::string out = "P5\n" + std::to_string(plane.width()) + " " +
                    std::to_string(plane.height()) + "\n255\n";
  for (int y = 0; y < plane.height(); ++y)
    for (int x = 0; x < plane.width(); ++x) {
      const float v = std::clamp(plane.at(0, y, x), 0.0f, 1.0f);
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255))));
    }
  return out;
}

}  // namespace omg
