#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omg/dataset.hpp"
#include "omg/model.hpp"
#include "omg/random.hpp"

namespace omg {

// Linear warm-up from min_lr to base_lr, then cosine annealing to min_lr.
struct ScheduleConfig {
  double base_lr = 6.7e-3;
  double min_lr = 6.7e-6;
  int total_epochs = 600;
  int warmup_epochs = 300;

  void validate() const;
};

double lr_at(const ScheduleConfig& cfg, double epoch);

struct TrainConfig {
  int batch_size = 24;
  LossWeights weights;
  ScheduleConfig schedule;
  uint64_t seed = 0;
  int threads = 1;
  // Swap local sentences for entries of Track::nl_aug with probability 1/2.
  bool augment_text = true;
};

struct TrainRecord {
  int epoch = 0;
  double lr = 0;
  double info = 0;
  double id = 0;
  double total = 0;
  double tau = 0;
};

struct TrainResult {
  Model model;
  std::vector<TrainRecord> trace;
};

struct BatchContext {
  const Granularities* granularities = nullptr;
  const Lexicons* lexicons = nullptr;  // required when augmenting
  int text_dim = 0;
  bool augment_text = false;
};

// One pair per listed track, each at a uniformly drawn frame.
std::vector<RawSample> assemble_batch(const std::vector<PreparedTrack>& tracks,
                                      const std::vector<std::size_t>& indices, Rng& rng,
                                      const BatchContext& ctx);

// M distinct tracks drawn without replacement; DataError when M exceeds the
// number of tracks.
std::vector<RawSample> make_batch(const std::vector<PreparedTrack>& tracks, int batch_size,
                                  Rng& rng, const BatchContext& ctx);

// Epochs of shuffled one-pass minibatches with plain gradient descent.
TrainResult train(const Model& initial, const std::vector<PreparedTrack>& tracks,
                  const TrainConfig& config, const Lexicons& lex = default_lexicons());

// "epoch,L_info,L_id,L_total,tau" rows.
std::string trace_to_csv(const std::vector<TrainRecord>& trace);

}  // namespace omg
