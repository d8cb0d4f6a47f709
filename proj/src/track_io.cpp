#include "omg/track_io.hpp"

#include <json.hpp>

#include "omg/geometry.hpp"
#include "omg/motion_raster.hpp"

namespace omg {

using nlohmann::json;

namespace {

Track parse_track(const json& j) {
  if (!j.is_object()) throw DataError("expected an object");
  Track t;
  t.track_id = j.at("id").get<std::string>();
  t.vehicle_class_id = j.at("class_id").get<int>();
  const auto& fs = j.at("frame_size");
  if (!fs.is_array() || fs.size() != 2) throw DataError("frame_size must be [W, H]");
  t.frame_size = {fs[0].get<int>(), fs[1].get<int>()};
  for (const auto& f : j.at("frames")) {
    if (!f.is_array() || f.size() != 5)
      throw DataError("each frame must be [frame_index, x, y, w, h]");
    t.frames.push_back({f[0].get<int64_t>(),
                        {f[1].get<double>(), f[2].get<double>(), f[3].get<double>(),
                         f[4].get<double>()}});
  }
  const auto& nl = j.at("nl");
  if (!nl.is_array() || nl.size() != 3) throw DataError("nl must hold exactly 3 sentences");
  for (std::size_t i = 0; i < 3; ++i) t.sentences[i] = nl[i].get<std::string>();
  if (j.contains("nl_aug")) t.nl_aug = j.at("nl_aug").get<std::vector<std::string>>();
  if (j.contains("crops")) t.crops = j.at("crops").get<std::string>();
  validate_track(t);
  return t;
}

}  // namespace

std::vector<Track> parse_tracks_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed track JSON: ") + e.what());
  }
  if (!doc.is_array()) throw DataError("track JSON must be an array of track objects");
  std::vector<Track> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    try {
      out.push_back(parse_track(doc[i]));
    } catch (const std::exception& e) {
      std::string who = "record " + std::to_string(i);
      if (doc[i].is_object() && doc[i].contains("id") && doc[i]["id"].is_string())
        who += " (id '" + doc[i]["id"].get<std::string>() + "')";
      throw DataError(who + ": " + e.what());
    }
  }
  return out;
}

std::string tracks_to_json(const std::vector<Track>& tracks) {
  json doc = json::array();
  for (const auto& t : tracks) {
    json frames = json::array();
    for (const auto& f : t.frames)
      frames.push_back({f.frame_index, f.box.x, f.box.y, f.box.w, f.box.h});
    json j = {{"id", t.track_id},
              {"class_id", t.vehicle_class_id},
              {"frame_size", {t.frame_size.width, t.frame_size.height}},
              {"frames", std::move(frames)},
              {"nl", {t.sentences[0], t.sentences[1], t.sentences[2]}}};
    if (!t.nl_aug.empty()) j["nl_aug"] = t.nl_aug;
    if (!t.crops.empty()) j["crops"] = t.crops;
    doc.push_back(std::move(j));
  }
  return doc.dump(1) + "\n";
}

TrackSet load_track_set(const std::filesystem::path& path) {
  TrackSet set;
  set.tracks = parse_tracks_json(read_file(path));
  set.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return set;
}

NamedTensors pixels_to_sections(const Track& track, const TrackPixels& pixels) {
  if (pixels.target.size() != track.frames.size() ||
      pixels.context.size() != track.frames.size())
    throw DataError("track '" + track.track_id + "': need one target and context crop per frame");
  NamedTensors out;
  for (std::size_t i = 0; i < track.frames.size(); ++i) {
    const std::string fi = std::to_string(track.frames[i].frame_index);
    out.emplace_back("target/" + fi, raster_to_tensor(pixels.target[i]));
    out.emplace_back("context/" + fi, raster_to_tensor(pixels.context[i]));
  }
  return out;
}

TrackPixels pixels_from_sections(const Track& track, const NamedTensors& sections) {
  TrackPixels px;
  for (const auto& f : track.frames) {
    const std::string fi = std::to_string(f.frame_index);
    const Tensor* t = find_section(sections, "target/" + fi);
    const Tensor* c = find_section(sections, "context/" + fi);
    if (t == nullptr || c == nullptr)
      throw DataError("track '" + track.track_id + "': crops missing for frame " + fi);
    px.target.push_back(tensor_to_raster(*t));
    px.context.push_back(tensor_to_raster(*c));
    const PixelRect r = pixel_rect(f.box);
    if (px.target.back().channels() != 3 || px.target.back().width() != r.w ||
        px.target.back().height() != r.h)
      throw DataError("track '" + track.track_id + "': target crop for frame " + fi +
                      " does not match its box");
    if (px.context.back().channels() != 3)
      throw DataError("track '" + track.track_id + "': context crops need 3 channels");
  }
  return px;
}

TrackPixels load_pixels(const TrackSet& set, std::size_t index) {
  const Track& t = set.tracks.at(index);
  if (t.crops.empty()) return {};
  return pixels_from_sections(t, decode_container(read_file(set.base_dir / t.crops)));
}

std::string file_stem(const std::string& track_id) {
  std::string out;
  for (char c : track_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c == '.';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

}  // namespace omg
