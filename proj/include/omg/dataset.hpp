#pragma once

#include <string>
#include <vector>

#include "omg/model.hpp"
#include "omg/text_pipeline.hpp"
#include "omg/track_io.hpp"

namespace omg {

// A track with every raw feature the encoders consume, computed once.
struct PreparedTrack {
  std::string id;
  int label = 0;
  std::array<std::string, 3> sentences;
  std::vector<std::string> paraphrases;
  QueryTexts texts;
  // Raw text features: global, local1..3, prompt (all five, regardless of
  // which granularities the model uses).
  std::vector<std::vector<double>> text_features;
  std::vector<std::vector<double>> target_features;   // per frame
  std::vector<std::vector<double>> context_features;  // per frame
  std::vector<double> motion_features;
  std::size_t frame_count = 0;
};

PreparedTrack prepare_track(const Track& track, const TrackPixels& pixels,
                            const ModelConfig& config, const Lexicons& lex);

std::vector<PreparedTrack> prepare_tracks(const std::vector<Track>& tracks,
                                          const std::vector<TrackPixels>& pixels,
                                          const ModelConfig& config, const Lexicons& lex,
                                          int threads = 1);

// Text features of the enabled granularities, in Granularities order.
std::vector<std::vector<double>> select_text(const PreparedTrack& t, const Granularities& g);
// Visual features of the enabled granularities at one frame.
std::vector<std::vector<double>> select_visual(const PreparedTrack& t, std::size_t frame,
                                               const Granularities& g);

RawSample make_sample(const PreparedTrack& t, std::size_t frame, const Granularities& g);

// Text features rebuilt after swapping local sentences for paraphrases.
std::vector<std::vector<double>> text_features_for(const std::array<std::string, 3>& sentences,
                                                   int text_dim, const Lexicons& lex);

}  // namespace omg
