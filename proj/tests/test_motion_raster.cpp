#include <doctest.h>

#include "omg/geometry.hpp"
#include "omg/motion_raster.hpp"
#include "support.hpp"

using namespace omg;

namespace {

using Boxes = std::vector<BoundingBox>;

std::size_t nonzero(const Raster& r, int c) {
  std::size_t n = 0;
  for (int y = 0; y < r.height(); ++y)
    for (int x = 0; x < r.width(); ++x) n += r.at(c, y, x) != 0.0f;
  return n;
}

Track line_track() {
  Track t;
  t.track_id = "line";
  t.frame_size = {120, 80};
  for (int i = 0; i < 6; ++i) t.frames.push_back({i, {10.0 + 15 * i, 30, 12, 10}});
  return t;
}

std::vector<Raster> crops_for(const Track& t, float value) {
  std::vector<Raster> out;
  for (const auto& f : t.frames) {
    const PixelRect r = pixel_rect(f.box);
    out.emplace_back(3, r.h, r.w, value);
  }
  return out;
}

}  // namespace

TEST_CASE("single pasted crop covers exactly its box") {
  const Raster canvas = composite_foreground(Boxes{{10, 10, 5, 5}}, {Raster(3, 5, 5, 1.0f)}, {40, 40});
  for (int c = 0; c < 3; ++c) CHECK(nonzero(canvas, c) == 25);
  CHECK(canvas.at(0, 10, 10) == 1.0f);
  CHECK(canvas.at(0, 14, 14) == 1.0f);
  CHECK(canvas.at(0, 15, 15) == 0.0f);
}

TEST_CASE("disjoint crops cover the sum of their areas") {
  const Raster canvas = composite_foreground(Boxes{{0, 0, 4, 3}, {10, 10, 6, 5}},
                                             {Raster(3, 3, 4, 0.5f), Raster(3, 5, 6, 0.25f)},
                                             {32, 32});
  CHECK(nonzero(canvas, 1) == 12 + 30);
}

TEST_CASE("compositing rejects empty or mismatched crop lists") {
  CHECK_THROWS_AS(composite_foreground(Boxes{{0, 0, 4, 4}}, {}, {10, 10}),
                  DataError);
  CHECK_THROWS_AS(composite_foreground(Boxes{{0, 0, 4, 4}}, {Raster(3, 3, 3, 1.0f)}, {10, 10}),
                  DataError);
}

TEST_CASE("single center stamps a disk") {
  const Raster m = rasterize_trajectory(Boxes{{45, 45, 10, 10}}, {100, 100}, 9);
  CHECK(m.at(0, 54, 50) == 1.0f);
  CHECK(m.at(0, 55, 50) == 0.0f);
  CHECK(m.at(0, 50, 54) == 1.0f);
  CHECK(m.at(0, 50, 55) == 0.0f);
}

TEST_CASE("two centers draw a horizontal line") {
  const Raster m = rasterize_trajectory(Boxes{{9, 49, 2, 2}, {89, 49, 2, 2}}, {100, 100}, 1);
  CHECK(m.at(0, 50, 50) == 1.0f);
  CHECK(m.at(0, 51, 50) == 0.0f);
  CHECK(nonzero(m, 0) == 81);
}

TEST_CASE("repeated centers match a single center") {
  const BoundingBox b{20, 20, 8, 8};
  CHECK(rasterize_trajectory(Boxes{b, b, b}, {60, 60}, 7) == rasterize_trajectory(Boxes{b}, {60, 60}, 7));
}

TEST_CASE("trajectory mask equals a brute-force distance scan") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const FrameSize canvas{8 + static_cast<int>(rng.below(40)), 8 + static_cast<int>(rng.below(40))};
    std::vector<BoundingBox> boxes;
    const int n = 1 + static_cast<int>(rng.below(5));
    for (int i = 0; i < n; ++i)
      boxes.push_back({double(rng.below(canvas.width)), double(rng.below(canvas.height)),
                       double(1 + rng.below(6)), double(1 + rng.below(6))});
    const double thickness = 1 + static_cast<double>(rng.below(9));
    const Raster m = rasterize_trajectory(boxes, canvas, thickness);
    const auto ref = testing::brute_force_mask(boxes, canvas, thickness);
    for (int y = 0; y < canvas.height; ++y)
      for (int x = 0; x < canvas.width; ++x)
        REQUIRE(m.at(0, y, x) == float(ref[static_cast<std::size_t>(y) * canvas.width + x]));
  }
}

TEST_CASE("motion map has the default 4 x 384 x 384 shape") {
  const Track t = line_track();
  const Raster m = build_motion_map(t, crops_for(t, 0.8f));
  CHECK(m.channels() == 4);
  CHECK(m.height() == 384);
  CHECK(m.width() == 384);
  for (float v : m.data()) {
    REQUIRE(v >= 0.0f);
    REQUIRE(v <= 1.0f);
  }
}

TEST_CASE("motion map is bit-identical across calls") {
  const Track t = line_track();
  CHECK(build_motion_map(t, crops_for(t, 0.3f)) == build_motion_map(t, crops_for(t, 0.3f)));
}

TEST_CASE("black crops leave the trajectory channel unchanged") {
  const Track t = line_track();
  const Raster lit = build_motion_map(t, crops_for(t, 0.9f));
  const Raster dark = build_motion_map(t, crops_for(t, 0.0f));
  for (int c = 0; c < 3; ++c) CHECK(nonzero(dark, c) == 0);
  CHECK(dark.plane(3) == lit.plane(3));
  CHECK(build_motion_map(t, {}).plane(3) == lit.plane(3));
}

TEST_CASE("motion map rejects a crop count that does not match the frames") {
  const Track t = line_track();
  auto crops = crops_for(t, 0.5f);
  crops.pop_back();
  CHECK_THROWS_AS(build_motion_map(t, crops), DataError);
}

TEST_CASE("bilinear resize preserves constant images") {
  const Raster src(2, 7, 5, 0.625f);
  const Raster dst = resize_bilinear(src, 13, 11);
  for (float v : dst.data()) CHECK(v == 0.625f);
}

TEST_CASE("pgm export has a valid header") {
  const std::string pgm = to_pgm(Raster(1, 3, 4, 1.0f));
  CHECK(pgm.rfind("P5\n4 3\n255\n", 0) == 0);
  CHECK(pgm.size() == std::string("P5\n4 3\n255\n").size() + 12);
}
