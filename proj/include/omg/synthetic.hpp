#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omg/random.hpp"
#include "omg/track_io.hpp"

namespace omg {

struct SyntheticOptions {
  uint64_t seed = 0;
  int vehicles = 32;            // distinct vehicle IDs
  double noise = 0.0;           // stddev of additive pixel noise
  int duplicated_ids = 0;       // IDs that appear in several tracks
  int tracks_per_duplicate = 3;
  int frames = 16;
  double relation_rate = 0.5;   // probability a track has a following vehicle
  FrameSize frame{320, 240};
};

// Hidden attributes behind one synthetic track.
struct VehicleLatent {
  int vehicle_id = 0;
  int color = 0;           // index into synthetic_colors()
  int vtype = 0;           // index into synthetic_types()
  int motion = 0;          // index into synthetic_motions()
  int neighbor_color = -1; // following vehicle's color, -1 for none
  int phrasing = 0;        // sentence template variant

  bool operator==(const VehicleLatent&) const = default;
};

struct SyntheticColor {
  std::string word;
  float rgb[3];
};
struct SyntheticType {
  std::string word;
  int width;
  int height;
  uint16_t glass_mask;  // 4x4 cell layout of window pixels
};
struct SyntheticMotion {
  std::string phrase;
};

const std::vector<SyntheticColor>& synthetic_colors();
const std::vector<SyntheticType>& synthetic_types();
const std::vector<SyntheticMotion>& synthetic_motions();

struct SyntheticWorld {
  SyntheticOptions options;
  std::vector<VehicleLatent> latents;  // one per track
  std::vector<Track> tracks;
  std::vector<TrackPixels> pixels;
};

// Boxes, pixels and three sentences for one latent record. Frame indices
// start at `first_frame`.
struct RenderedTrack {
  Track track;
  TrackPixels pixels;
};
RenderedTrack render_track(const VehicleLatent& latent, const std::string& track_id,
                           int64_t first_frame, const SyntheticOptions& options, Rng& rng);

// Throws DataError when options.vehicles < 2.
SyntheticWorld generate_synthetic(const SyntheticOptions& options);

}  // namespace omg
