#include "omg/dataset.hpp"

#include "omg/parallel.hpp"

namespace omg {

std::vector<std::vector<double>> text_features_for(const std::array<std::string, 3>& sentences,
                                                   int text_dim, const Lexicons& lex) {
  const QueryTexts q = build_query_texts(sentences, lex);
  return {featurize_text(q.global_text, text_dim), featurize_text(q.local_texts[0], text_dim),
          featurize_text(q.local_texts[1], text_dim), featurize_text(q.local_texts[2], text_dim),
          featurize_text(q.prompt_text, text_dim)};
}

PreparedTrack prepare_track(const Track& track, const TrackPixels& pixels,
                            const ModelConfig& config, const Lexicons& lex) {
  validate_track(track);
  PreparedTrack p;
  p.id = track.track_id;
  p.label = track.vehicle_class_id;
  p.sentences = track.sentences;
  p.paraphrases = track.nl_aug;
  p.texts = build_query_texts(track.sentences, lex);
  p.text_features = text_features_for(track.sentences, config.text_dim, lex);
  p.frame_count = track.frames.size();
  if (pixels.empty())
    throw DataError("track '" + track.track_id + "' has no pixel data (missing \"crops\")");
  if (pixels.target.size() != track.frames.size() || pixels.context.size() != track.frames.size())
    throw DataError("track '" + track.track_id + "': one crop pair per frame required");
  for (std::size_t i = 0; i < track.frames.size(); ++i) {
    p.target_features.push_back(featurize_raster(pixels.target[i], config.crop_feature_dim()));
    p.context_features.push_back(featurize_raster(pixels.context[i], config.crop_feature_dim()));
  }
  if (config.granularities.motion) {
    const Raster map = build_motion_map(track, pixels.target, config.motion);
    p.motion_features = featurize_raster(map, config.motion_feature_dim());
  }
  return p;
}

std::vector<PreparedTrack> prepare_tracks(const std::vector<Track>& tracks,
                                          const std::vector<TrackPixels>& pixels,
                                          const ModelConfig& config, const Lexicons& lex,
                                          int threads) {
  if (tracks.size() != pixels.size()) throw DataError("one pixel set per track required");
  std::vector<PreparedTrack> out(tracks.size());
  parallel_for(tracks.size(), threads,
               [&](std::size_t i) { out[i] = prepare_track(tracks[i], pixels[i], config, lex); });
  return out;
}

std::vector<std::vector<double>> select_text(const PreparedTrack& t, const Granularities& g) {
  std::vector<std::vector<double>> out{t.text_features[0]};
  if (g.local) out.insert(out.end(), t.text_features.begin() + 1, t.text_features.begin() + 4);
  if (g.prompt) out.push_back(t.text_features[4]);
  return out;
}

std::vector<std::vector<double>> select_visual(const PreparedTrack& t, std::size_t frame,
                                               const Granularities& g) {
  if (frame >= t.frame_count) throw DataError("frame index outside the track");
  std::vector<std::vector<double>> out{t.target_features[frame]};
  if (g.context) out.push_back(t.context_features[frame]);
  if (g.motion) {
    if (t.motion_features.empty()) throw DataError("motion features were not prepared");
    out.push_back(t.motion_features);
  }
  return out;
}

RawSample make_sample(const PreparedTrack& t, std::size_t frame, const Granularities& g) {
  return {select_text(t, g), select_visual(t, frame, g), t.label};
}

}  // namespace omg
