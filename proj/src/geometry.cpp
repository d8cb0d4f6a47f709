#include "omg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace omg {

void validate_track(const Track& track, int num_classes) {
  const std::string who = "track '" + track.track_id + "': ";
  if (track.frames.empty()) throw DataError(who + "empty trajectory");
  if (track.frame_size.width <= 0 || track.frame_size.height <= 0)
    throw DataError(who + "frame size must be positive");
  for (std::size_t i = 0; i < track.frames.size(); ++i) {
    const auto& f = track.frames[i];
    if (!(f.box.w > 0) || !(f.box.h > 0))
      throw DataError(who + "box " + std::to_string(i) + " has non-positive size");
    if (i > 0 && f.frame_index <= track.frames[i - 1].frame_index)
      throw DataError(who + "frame indices must be strictly increasing");
  }
  if (track.vehicle_class_id < 0 ||
      (num_classes > 0 && track.vehicle_class_id >= num_classes))
    throw DataError(who + "class id out of range");
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  if (iw <= 0) return 0.0;
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (ih <= 0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

BoundingBox clamp_to_frame(const BoundingBox& box, FrameSize frame) {
  const double x0 = std::max(box.x, 0.0);
  const double y0 = std::max(box.y, 0.0);
  const double x1 = std::min(box.right(), static_cast<double>(frame.width));
  const double y1 = std::min(box.bottom(), static_cast<double>(frame.height));
  if (x1 <= x0 || y1 <= y0) throw DataError("box lies outside the frame");
  return {x0, y0, x1 - x0, y1 - y0};
}

BoundingBox expand_context_box(const BoundingBox& box, FrameSize frame) {
  return clamp_to_frame({box.x - box.w, box.y - box.h, 3 * box.w, 3 * box.h},
                        frame);
}

std::vector<std::size_t> filter_overlapping_boxes(const Track& track,
                                                  double threshold) {
  if (track.frames.empty()) throw DataError("empty trajectory");
  if (!(threshold > 0 && threshold <= 1))
    throw DataError("overlap threshold must lie in (0, 1]");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < track.frames.size(); ++i) {
    const auto& box = track.frames[i].box;
    const bool ok = std::all_of(kept.begin(), kept.end(), [&](std::size_t j) {
      return iou(box, track.frames[j].box) <= threshold;
    });
    if (ok) kept.push_back(i);
  }
  return kept;
}

std::size_t middle_frame_index(std::size_t length) {
  if (length == 0) throw DataError("empty trajectory");
  return length / 2;
}

const FrameEntry& sample_middle_frame(const Track& track) {
  return track.frames[middle_frame_index(track.frames.size())];
}

std::vector<std::size_t> uniform_indices(std::size_t length, std::size_t k) {
  if (length == 0) throw DataError("empty trajectory");
  if (k == 0) throw DataError("sample count must be >= 1");
  if (k == 1) return {middle_frame_index(length)};
  std::vector<std::size_t> out(k);
  const double step = static_cast<double>(length - 1) / static_cast<double>(k - 1);
  for (std::size_t i = 0; i < k; ++i)
    out[i] = static_cast<std::size_t>(std::lround(static_cast<double>(i) * step));
  return out;
}

std::vector<FrameEntry> sample_uniform(const Track& track, std::size_t k) {
  std::vector<FrameEntry> out;
  for (std::size_t i : uniform_indices(track.frames.size(), k))
    out.push_back(track.frames[i]);
  return out;
}

}  // namespace omg
