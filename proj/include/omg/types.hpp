#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace omg {

// Malformed or inconsistent input data (bad JSON, empty track, shape mismatch).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: degenerate embedding, non-finite loss.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Axis-aligned box in pixels, top-left anchored.
struct BoundingBox {
  double x = 0;
  double y = 0;
  double w = 1;
  double h = 1;

  double area() const { return w * h; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double center_x() const { return x + w / 2; }
  double center_y() const { return y + h / 2; }

  bool operator==(const BoundingBox&) const = default;
};

struct FrameSize {
  int width = 0;
  int height = 0;

  bool operator==(const FrameSize&) const = default;
};

struct FrameEntry {
  int64_t frame_index = 0;
  BoundingBox box;

  bool operator==(const FrameEntry&) const = default;
};

struct Track {
  std::string track_id;
  int vehicle_class_id = 0;
  std::vector<FrameEntry> frames;
  FrameSize frame_size;
  std::array<std::string, 3> sentences;
  // Externally supplied paraphrases (e.g. backtranslations); may be empty.
  std::vector<std::string> nl_aug;
  // Path of the OMGT crop container holding this track's pixels, relative to
  // the track file; empty when no pixel data accompanies the track.
  std::string crops;
};

// Throws DataError when the track violates its invariants. num_classes <= 0
// skips the class-range check.
void validate_track(const Track& track, int num_classes = 0);

struct BatchConfig {
  int batch_size = 24;
  int text_granularities = 5;
  int visual_granularities = 3;
  int embed_dim = 64;
};

}  // namespace omg
