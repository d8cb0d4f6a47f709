#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "omg/raster.hpp"
#include "omg/tensor_io.hpp"
#include "omg/types.hpp"

namespace omg {

// Per-frame pixel data of a track: the target crop (box-sized, 3 channels)
// and the context crop (expanded box, 3 channels). Either both hold one
// raster per frame or both are empty.
struct TrackPixels {
  std::vector<Raster> target;
  std::vector<Raster> context;

  bool empty() const { return target.empty(); }
};

struct TrackSet {
  std::vector<Track> tracks;
  std::filesystem::path base_dir;  // resolves Track::crops
};

// Track ingestion JSON: an array of
//   {"id": str, "class_id": int, "frame_size": [W, H],
//    "frames": [[frame_index, x, y, w, h], ...], "nl": [s1, s2, s3],
//    "nl_aug": [str, ...] (optional), "crops": str (optional)}
std::vector<Track> parse_tracks_json(const std::string& text);
std::string tracks_to_json(const std::vector<Track>& tracks);

TrackSet load_track_set(const std::filesystem::path& path);

// Container sections "target/<frame_index>" and "context/<frame_index>".
NamedTensors pixels_to_sections(const Track& track, const TrackPixels& pixels);
TrackPixels pixels_from_sections(const Track& track, const NamedTensors& sections);

// Empty TrackPixels when the track carries no crops reference.
TrackPixels load_pixels(const TrackSet& set, std::size_t index);

// Track id made safe for use as a file name.
std::string file_stem(const std::string& track_id);

}  // namespace omg
