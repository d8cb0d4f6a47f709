#pragma once

#include <string>
#include <vector>

#include "omg/raster.hpp"
#include "omg/types.hpp"

namespace omg {

inline constexpr int kMotionMapSize = 384;
inline constexpr double kDefaultLineThickness = 9.0;

struct MotionMapOptions {
  int out_width = kMotionMapSize;
  int out_height = kMotionMapSize;
  double thickness = kDefaultLineThickness;
  double overlap_threshold = 0.9;
};

// Integer pixel footprint of a box: origin and size rounded to nearest.
struct PixelRect {
  int x;
  int y;
  int w;
  int h;
};
PixelRect pixel_rect(const BoundingBox& box);

// Pastes crops onto a black canvas at their box positions, in order, later
// crops overwriting earlier ones. `boxes` and `crops` pair up 1:1.
Raster composite_foreground(const std::vector<BoundingBox>& boxes,
                            const std::vector<Raster>& crops, FrameSize canvas);

// Same, with boxes taken from the frames of `track` that survive
// filter_overlapping_boxes at `threshold`.
Raster composite_foreground(const Track& track, const std::vector<Raster>& crops,
                            FrameSize canvas, double threshold = 0.9);

// Binary mask of all pixels within thickness / 2 of the polyline through the
// box centers. Pixel (x, y) sits at integer coordinates.
Raster rasterize_trajectory(const std::vector<BoundingBox>& boxes,
                            FrameSize canvas, double thickness);
Raster rasterize_trajectory(const Track& track, FrameSize canvas,
                            double thickness);

// 4-channel [R, G, B, trajectory] map. `crops` hold one target crop per frame
// of the track (all frames, not only the kept ones); an empty vector yields
// black foreground channels.
Raster build_motion_map(const Track& track, const std::vector<Raster>& crops,
                        const MotionMapOptions& options = {});

// 8-bit binary PGM of a single-channel raster, values scaled from [0, 1].
std::string to_pgm(const Raster& plane);

}  // namespace omg
