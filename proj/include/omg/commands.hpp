#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "omg/evaluation.hpp"
#include "omg/synthetic.hpp"
#include "omg/train.hpp"

namespace omg {

// Everything a training or evaluation run needs besides the data.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  EvalOptions eval;
  int num_classes = 0;  // 0: one more than the largest class id in the data
};

// JSON object whose keys override `base`:
//   batch_size, embed_dim, text_dim, grid, context, motion, local, prompt,
//   mft, lambda1, lambda2, base_lr, min_lr, total_epochs, warmup_epochs,
//   seed, shared_id_head, thickness, motion_size, augment_text, num_classes
RunConfig parse_run_config(const std::string& json_text, RunConfig base = {});

// Throws DataError naming the first inconsistent field.
void validate_run_config(const RunConfig& cfg);

struct PreprocessOptions {
  MotionMapOptions motion;
  bool write_pgm = false;
  int threads = 1;
};

// Per track: motion/<stem>.omgt, boxes/<stem>.json (and motion/<stem>.pgm).
// Returns the manifest, which is also written to out_dir/manifest.json.
std::string run_preprocess(const TrackSet& set, const std::filesystem::path& out_dir,
                           const PreprocessOptions& options);

// [{"id", "color", "type", "prompt", "global_text"}, ...]
std::string run_prompts(const TrackSet& set, const Lexicons& lex);

// Writes out_dir/tracks.json and out_dir/crops/<stem>.omgt; returns a JSON
// summary.
std::string run_synth(const SyntheticOptions& options, const std::filesystem::path& out_dir);

std::vector<TrackPixels> load_all_pixels(const TrackSet& set, int threads = 1);

struct TrainOutput {
  Model model;
  std::vector<TrainRecord> trace;
};

TrainOutput run_train(const TrackSet& set, const RunConfig& cfg, const Lexicons& lex);

std::string run_eval(const Model& model, const TrackSet& set, const EvalOptions& options,
                     const Lexicons& lex);

// Similarity tensor [Q, G, P]. Gallery ids come from `gallery_ids` when
// non-empty, otherwise "g0", "g1", ...; query q's truth defaults to gallery q.
std::string run_eval_tensor(const Tensor& tensor, const std::vector<std::string>& gallery_ids,
                            std::vector<int> truth, const EvalOptions& options);

}  // namespace omg
