#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "omg/encoder.hpp"
#include "omg/granular_loss.hpp"
#include "omg/motion_raster.hpp"
#include "omg/tensor_io.hpp"

namespace omg {

// Which granularities are active. The target crop and global text are always
// on; toggles follow the ablation columns (Context, Motion, Local, Prompt).
struct Granularities {
  bool context = true;
  bool motion = true;
  bool local = true;
  bool prompt = true;

  int text_count() const { return 1 + (local ? 3 : 0) + (prompt ? 1 : 0); }
  int visual_count() const { return 1 + (context ? 1 : 0) + (motion ? 1 : 0); }
  std::vector<std::string> text_names() const;
  std::vector<std::string> visual_names() const;
};

struct ModelConfig {
  Granularities granularities;
  int embed_dim = 64;
  int text_dim = 1024;
  int grid = 8;  // visual featurization grid side
  int num_classes = 1;
  bool shared_id_head = true;
  double init_tau = kInitialTemperature;
  double init_weight_scale = 1.0;  // stddev multiplier on 1/sqrt(in_dim)
  MotionMapOptions motion;

  int crop_feature_dim() const { return raster_feature_dim(3, grid); }
  int motion_feature_dim() const { return raster_feature_dim(4, grid); }
};

struct ModelParams {
  EncoderParams text;                 // shared by every text granularity
  std::vector<EncoderParams> visual;  // one per visual granularity, untied
  IdHead head;
  Temperature temperature;
};

// Visits every trainable scalar in a fixed order.
void for_each_parameter(ModelParams& params, const std::function<void(double&)>& fn);
std::size_t parameter_count(const ModelParams& params);

// Parameters with the same shapes as `like`, all zero.
ModelParams zeros_like(const ModelParams& like);

struct Model {
  ModelConfig config;
  ModelParams params;

  static Model initialize(const ModelConfig& config, uint64_t seed);
};

// Raw (pre-encoder) inputs of one text-vehicle pair, ordered like
// Granularities::text_names() / visual_names().
struct RawSample {
  std::vector<std::vector<double>> text;
  std::vector<std::vector<double>> visual;
  int label = 0;
};

struct ForwardPass {
  EmbeddingBatch embeddings;
  std::vector<EncodeResult> text_results;    // [pair * N_t + j]
  std::vector<EncodeResult> visual_results;  // [pair * N_v + k]
};

// Encodes every granularity of every pair. `threads` > 1 encodes pairs in
// parallel; results are identical to the serial pass.
ForwardPass forward(const ModelParams& params, std::span<const RawSample> batch,
                    int threads = 1);

struct StepResult {
  LossBundle loss;
  ModelParams grads;
};

// Full objective and its gradient with respect to every parameter.
StepResult loss_and_gradients(const ModelParams& params, std::span<const RawSample> batch,
                              LossWeights weights, int threads = 1);

// p <- p - lr * g for every parameter.
ModelParams sgd_step(const ModelParams& params, const ModelParams& grads, double lr);

std::vector<double> embed_text(const ModelParams& params, std::span<const double> raw);
std::vector<double> embed_visual(const ModelParams& params, int granularity,
                                 std::span<const double> raw);

// Mean of per-frame embeddings, renormalized; NumericError if the mean is 0.
std::vector<double> mean_embedding(const std::vector<std::vector<double>>& embeddings);

NamedTensors model_to_sections(const Model& model);
Model model_from_sections(const NamedTensors& sections);

}  // namespace omg
