#pragma once

#include <cstddef>
#include <vector>

#include "omg/types.hpp"

namespace omg {

inline constexpr double kDefaultOverlapThreshold = 0.9;

double iou(const BoundingBox& a, const BoundingBox& b);

// [x, y, w, h] -> [x - w, y - h, 3w, 3h], intersected with the frame.
BoundingBox expand_context_box(const BoundingBox& box, FrameSize frame);

// Intersection of a box with the frame rectangle; DataError if empty.
BoundingBox clamp_to_frame(const BoundingBox& box, FrameSize frame);

// Greedy chronological scan. Returns indices into track.frames of the boxes
// whose IoU with every previously kept box is <= threshold.
std::vector<std::size_t> filter_overlapping_boxes(
    const Track& track, double threshold = kDefaultOverlapThreshold);

std::size_t middle_frame_index(std::size_t length);
const FrameEntry& sample_middle_frame(const Track& track);

// Endpoint-inclusive rounding, round(i * (L - 1) / (k - 1)). k == 1 gives the
// middle frame.
std::vector<std::size_t> uniform_indices(std::size_t length, std::size_t k);
std::vector<FrameEntry> sample_uniform(const Track& track, std::size_t k);

}  // namespace omg
