#include "omg/train.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace omg {

void ScheduleConfig::validate() const {
  if (!(min_lr > 0) || !(min_lr <= base_lr))
    throw DataError("learning rates must satisfy 0 < min_lr <= base_lr");
  if (total_epochs < 1) throw DataError("total_epochs must be >= 1");
  if (warmup_epochs < 0 || warmup_epochs >= total_epochs)
    throw DataError("warmup_epochs must lie in [0, total_epochs)");
}

double lr_at(const ScheduleConfig& cfg, double epoch) {
  cfg.validate();
  if (!(epoch >= 0) || epoch > cfg.total_epochs) throw DataError("epoch outside the schedule");
  if (epoch <= cfg.warmup_epochs) {
    if (cfg.warmup_epochs == 0) return cfg.base_lr;
    return cfg.min_lr + (cfg.base_lr - cfg.min_lr) * (epoch / cfg.warmup_epochs);
  }
  constexpr double kPi = 3.14159265358979323846;
  const double progress = (epoch - cfg.warmup_epochs) / (cfg.total_epochs - cfg.warmup_epochs);
  return cfg.min_lr + (cfg.base_lr - cfg.min_lr) * (1 + std::cos(kPi * progress)) / 2;
}

std::vector<RawSample> assemble_batch(const std::vector<PreparedTrack>& tracks,
                                      const std::vector<std::size_t>& indices, Rng& rng,
                                      const BatchContext& ctx) {
  std::vector<RawSample> batch;
  batch.reserve(indices.size());
  for (std::size_t idx : indices) {
    const PreparedTrack& t = tracks.at(idx);
    const std::size_t frame = rng.below(t.frame_count);
    RawSample s = make_sample(t, frame, *ctx.granularities);
    if (ctx.augment_text && !t.paraphrases.empty()) {
      auto sentences = t.sentences;
      bool changed = false;
      for (auto& sentence : sentences)
        if (rng.below(2) == 1) {
          sentence = t.paraphrases[rng.below(t.paraphrases.size())];
          changed = true;
        }
      if (changed) {
        PreparedTrack aug = t;
        aug.text_features = text_features_for(sentences, ctx.text_dim, *ctx.lexicons);
        s.text = select_text(aug, *ctx.granularities);
      }
    }
    batch.push_back(std::move(s));
  }
  return batch;
}

std::vector<RawSample> make_batch(const std::vector<PreparedTrack>& tracks, int batch_size,
                                  Rng& rng, const BatchContext& ctx) {
  if (batch_size < 1) throw DataError("batch size must be >= 1");
  if (static_cast<std::size_t>(batch_size) > tracks.size())
    throw DataError("batch size exceeds the number of tracks");
  std::vector<std::size_t> order(tracks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order.begin(), order.end());
  order.resize(static_cast<std::size_t>(batch_size));
  return assemble_batch(tracks, order, rng, ctx);
}

TrainResult train(const Model& initial, const std::vector<PreparedTrack>& tracks,
                  const TrainConfig& config, const Lexicons& lex) {
  config.schedule.validate();
  if (tracks.empty()) throw DataError("no training tracks");
  if (config.batch_size < 1) throw DataError("batch size must be >= 1");
  for (const auto& t : tracks)
    if (t.label >= initial.config.num_classes)
      throw DataError("track '" + t.id + "' has class id outside the model's ID head");

  TrainResult out{initial, {}};
  ModelParams& params = out.model.params;
  const BatchContext ctx{&out.model.config.granularities, &lex, out.model.config.text_dim,
                         config.augment_text};
  Rng rng(config.seed);
  const std::size_t M = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.schedule.total_epochs; ++epoch) {
    const double lr = lr_at(config.schedule, epoch);
    std::vector<std::size_t> order(tracks.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order.begin(), order.end());

    TrainRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    for (std::size_t start = 0; start < order.size(); start += M) {
      const std::vector<std::size_t> chunk(
          order.begin() + static_cast<std::ptrdiff_t>(start),
          order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + M)));
      const auto batch = assemble_batch(tracks, chunk, rng, ctx);
      const StepResult step = loss_and_gradients(params, batch, config.weights, config.threads);
      const double w = static_cast<double>(chunk.size()) / static_cast<double>(order.size());
      rec.info += w * step.loss.info;
      rec.id += w * step.loss.id;
      rec.total += w * step.loss.total;
      params = sgd_step(params, step.grads, lr);
    }
    rec.tau = params.temperature.tau();
    if (!std::isfinite(rec.total) || !std::isfinite(rec.tau))
      throw NumericError("non-finite loss at epoch " + std::to_string(epoch));
    out.trace.push_back(rec);
  }
  return out;
}

std::string trace_to_csv(const std::vector<TrainRecord>& trace) {
  std::string out = "epoch,L_info,L_id,L_total,tau\n";
  char buf[160];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.epoch, r.info, r.id,
                  r.total, r.tau);
    out += buf;
  }
  return out;
}

}  // namespace omg
