#include <doctest.h>

#include "omg/geometry.hpp"
#include "omg/random.hpp"

using namespace omg;

namespace {

Track track_of(const std::vector<BoundingBox>& boxes, FrameSize frame = {200, 200}) {
  Track t;
  t.track_id = "t";
  t.frame_size = frame;
  for (std::size_t i = 0; i < boxes.size(); ++i)
    t.frames.push_back({static_cast<int64_t>(i), boxes[i]});
  return t;
}

Track track_of_length(std::size_t n) {
  std::vector<BoundingBox> boxes;
  for (std::size_t i = 0; i < n; ++i) boxes.push_back({double(i * 20), 0, 10, 10});
  return track_of(boxes, {1000, 100});
}

}  // namespace

TEST_CASE("iou of identical, disjoint and overlapping boxes") {
  const BoundingBox b{3, 4, 10, 20};
  CHECK(iou(b, b) == 1.0);
  CHECK(iou({0, 0, 1, 1}, {5, 5, 1, 1}) == 0.0);
  CHECK(iou({0, 0, 2, 2}, {1, 1, 2, 2}) == doctest::Approx(1.0 / 7).epsilon(1e-15));
}

TEST_CASE("iou is symmetric and bounded") {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const BoundingBox a{rng.uniform() * 50, rng.uniform() * 50, 1 + rng.uniform() * 30,
                        1 + rng.uniform() * 30};
    const BoundingBox b{rng.uniform() * 50, rng.uniform() * 50, 1 + rng.uniform() * 30,
                        1 + rng.uniform() * 30};
    const double v = iou(a, b);
    CHECK(v == iou(b, a));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("context box triples the box and clamps to the frame") {
  CHECK(expand_context_box({100, 50, 40, 30}, {1920, 1080}) == BoundingBox{60, 20, 120, 90});
  CHECK(expand_context_box({10, 10, 40, 30}, {100, 100}) == BoundingBox{0, 0, 90, 70});
  CHECK(expand_context_box({0, 0, 640, 480}, {640, 480}) == BoundingBox{0, 0, 640, 480});
}

TEST_CASE("box outside the frame is rejected") {
  CHECK_THROWS_AS(clamp_to_frame({500, 500, 10, 10}, {100, 100}), DataError);
}

TEST_CASE("overlap filter keeps the first of near-duplicates") {
  SUBCASE("identical boxes") {
    const auto kept = filter_overlapping_boxes(track_of(std::vector<BoundingBox>(10, {5, 5, 10, 10})), 0.9);
    CHECK(kept == std::vector<std::size_t>{0});
  }
  SUBCASE("disjoint boxes") {
    const auto kept = filter_overlapping_boxes(
        track_of({{0, 0, 10, 10}, {20, 0, 10, 10}, {40, 0, 10, 10}}), 0.9);
    CHECK(kept == std::vector<std::size_t>{0, 1, 2});
  }
  SUBCASE("mixed") {
    const auto kept = filter_overlapping_boxes(
        track_of({{0, 0, 10, 10}, {0, 0, 10, 10}, {20, 0, 10, 10}}), 0.9);
    CHECK(kept == std::vector<std::size_t>{0, 2});
  }
}

TEST_CASE("overlap filter rejects empty tracks") {
  Track t;
  t.frame_size = {10, 10};
  CHECK_THROWS_WITH_AS(filter_overlapping_boxes(t, 0.9), doctest::Contains("empty trajectory"),
                       DataError);
}

TEST_CASE("middle frame is floor(L/2)") {
  CHECK(middle_frame_index(5) == 2);
  CHECK(middle_frame_index(4) == 2);
  CHECK(middle_frame_index(1) == 0);
  CHECK(sample_middle_frame(track_of_length(7)).frame_index == 3);
}

TEST_CASE("uniform sampling rounds evenly spaced positions") {
  CHECK(uniform_indices(16, 8) == std::vector<std::size_t>{0, 2, 4, 6, 9, 11, 13, 15});
  CHECK(uniform_indices(3, 3) == std::vector<std::size_t>{0, 1, 2});
  CHECK(uniform_indices(1, 4) == std::vector<std::size_t>{0, 0, 0, 0});
  const auto frames = sample_uniform(track_of_length(16), 8);
  REQUIRE(frames.size() == 8);
  CHECK(frames.front().frame_index == 0);
  CHECK(frames.back().frame_index == 15);
}

TEST_CASE("uniform sampling keeps endpoints and order") {
  for (std::size_t L = 1; L <= 40; ++L)
    for (std::size_t k = 2; k <= 12; ++k) {
      const auto idx = uniform_indices(L, k);
      REQUIRE(idx.size() == k);
      CHECK(idx.front() == 0);
      CHECK(idx.back() == L - 1);
      CHECK(std::is_sorted(idx.begin(), idx.end()));
    }
}

TEST_CASE("track validation") {
  Track ok = track_of({{0, 0, 5, 5}, {1, 1, 5, 5}});
  CHECK_NOTHROW(validate_track(ok));
  Track bad_size = ok;
  bad_size.frames[1].box.w = 0;
  CHECK_THROWS_AS(validate_track(bad_size), DataError);
  Track bad_order = ok;
  bad_order.frames[1].frame_index = 0;
  CHECK_THROWS_AS(validate_track(bad_order), DataError);
  Track bad_class = ok;
  bad_class.vehicle_class_id = 4;
  CHECK_THROWS_AS(validate_track(bad_class, 4), DataError);
  CHECK_THROWS_AS(validate_track(track_of({})), DataError);
}
