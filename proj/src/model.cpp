#include "omg/model.hpp"

#include <cmath>
#include <string>

#include "omg/parallel.hpp"
#include "omg/random.hpp"
#include "omg/types.hpp"

namespace omg {

std::vector<std::string> Granularities::text_names() const {
  std::vector<std::string> n{"global"};
  if (local) n.insert(n.end(), {"local1", "local2", "local3"});
  if (prompt) n.push_back("prompt");
  return n;
}

std::vector<std::string> Granularities::visual_names() const {
  std::vector<std::string> n{"target"};
  if (context) n.push_back("context");
  if (motion) n.push_back("motion");
  return n;
}

void for_each_parameter(ModelParams& params, const std::function<void(double&)>& fn) {
  auto visit = [&](EncoderParams& e) {
    for (double& v : e.weight.values) fn(v);
    for (double& v : e.bias) fn(v);
  };
  visit(params.text);
  for (auto& e : params.visual) visit(e);
  for (auto& m : params.head.weights)
    for (double& v : m.values) fn(v);
  fn(params.temperature.log_tau);
}

std::size_t parameter_count(const ModelParams& params) {
  std::size_t n = 0;
  for_each_parameter(const_cast<ModelParams&>(params), [&](double&) { ++n; });
  return n;
}

ModelParams zeros_like(const ModelParams& like) {
  ModelParams z = like;
  for_each_parameter(z, [](double& v) { v = 0; });
  return z;
}

Model Model::initialize(const ModelConfig& config, uint64_t seed) {
  if (config.embed_dim < 1 || config.text_dim < 1 || config.grid < 1)
    throw DataError("model dimensions must be positive");
  if (config.num_classes < 1) throw DataError("model needs at least one class");
  if (!(config.init_tau > 0)) throw DataError("initial temperature must be positive");
  Rng rng(seed);
  auto make = [&](int in_dim) {
    EncoderParams e(config.embed_dim, in_dim);
    const double s = config.init_weight_scale / std::sqrt(static_cast<double>(in_dim));
    for (double& w : e.weight.values) w = s * rng.normal();
    return e;
  };
  Model m;
  m.config = config;
  m.params.text = make(config.text_dim);
  const Granularities& g = config.granularities;
  m.params.visual.push_back(make(config.crop_feature_dim()));
  if (g.context) m.params.visual.push_back(make(config.crop_feature_dim()));
  if (g.motion) m.params.visual.push_back(make(config.motion_feature_dim()));
  m.params.head = IdHead(config.num_classes, config.embed_dim,
                         config.shared_id_head ? 1 : g.visual_count());
  const double hs = 0.01;
  for (auto& w : m.params.head.weights)
    for (double& v : w.values) v = hs * rng.normal();
  m.params.temperature = Temperature::from_tau(config.init_tau);
  return m;
}

ForwardPass forward(const ModelParams& params, std::span<const RawSample> batch,
                    int threads) {
  if (batch.empty()) throw DataError("empty batch");
  const int M = static_cast<int>(batch.size());
  const int nt = static_cast<int>(batch[0].text.size());
  const int nv = static_cast<int>(batch[0].visual.size());
  if (nv != static_cast<int>(params.visual.size()))
    throw DataError("sample visual granularity count does not match the model");
  ForwardPass fp;
  fp.embeddings = EmbeddingBatch(M, nt, nv, params.text.out_dim());
  fp.text_results.resize(static_cast<std::size_t>(M) * nt);
  fp.visual_results.resize(static_cast<std::size_t>(M) * nv);
  parallel_for(batch.size(), threads, [&](std::size_t idx) {
    const int i = static_cast<int>(idx);
    const RawSample& s = batch[idx];
    if (static_cast<int>(s.text.size()) != nt || static_cast<int>(s.visual.size()) != nv)
      throw DataError("ragged granularity counts within a batch");
    for (int j = 0; j < nt; ++j) {
      auto& r = fp.text_results[static_cast<std::size_t>(i * nt + j)];
      r = encode(params.text, s.text[static_cast<std::size_t>(j)]);
      std::copy(r.y.begin(), r.y.end(), fp.embeddings.text(i, j).begin());
    }
    for (int k = 0; k < nv; ++k) {
      auto& r = fp.visual_results[static_cast<std::size_t>(i * nv + k)];
      r = encode(params.visual[static_cast<std::size_t>(k)], s.visual[static_cast<std::size_t>(k)]);
      std::copy(r.y.begin(), r.y.end(), fp.embeddings.visual(i, k).begin());
    }
  });
  return fp;
}

StepResult loss_and_gradients(const ModelParams& params, std::span<const RawSample> batch,
                              LossWeights weights, int threads) {
  const ForwardPass fp = forward(params, batch, threads);
  std::vector<int> labels;
  for (const auto& s : batch) labels.push_back(s.label);
  StepResult out;
  out.loss = total_loss(fp.embeddings, labels, params.temperature, params.head, weights);
  out.grads = zeros_like(params);

  // Accumulation runs serially in pair order so sums are bit-reproducible.
  const EmbeddingBatch& g = out.loss.grad;
  for (int i = 0; i < g.pairs; ++i) {
    const RawSample& s = batch[static_cast<std::size_t>(i)];
    for (int j = 0; j < g.text_granularities; ++j) {
      const auto& r = fp.text_results[static_cast<std::size_t>(i * g.text_granularities + j)];
      const auto dz = normalize_backward(r, g.text(i, j));
      accumulate_param_grads(dz, s.text[static_cast<std::size_t>(j)], out.grads.text.weight,
                             out.grads.text.bias);
    }
    for (int k = 0; k < g.visual_granularities; ++k) {
      const auto& r = fp.visual_results[static_cast<std::size_t>(i * g.visual_granularities + k)];
      const auto dz = normalize_backward(r, g.visual(i, k));
      auto& ge = out.grads.visual[static_cast<std::size_t>(k)];
      accumulate_param_grads(dz, s.visual[static_cast<std::size_t>(k)], ge.weight, ge.bias);
    }
  }
  out.grads.head.weights = out.loss.grad_head;
  out.grads.temperature.log_tau = out.loss.grad_log_tau;
  return out;
}

ModelParams sgd_step(const ModelParams& params, const ModelParams& grads, double lr) {
  ModelParams out = params;
  std::vector<double> flat;
  for_each_parameter(const_cast<ModelParams&>(grads), [&](double& g) { flat.push_back(g); });
  std::size_t i = 0;
  for_each_parameter(out, [&](double& p) {
    if (i >= flat.size()) throw DataError("gradient shape does not match parameters");
    p -= lr * flat[i++];
  });
  if (i != flat.size()) throw DataError("gradient shape does not match parameters");
  return out;
}

std::vector<double> embed_text(const ModelParams& params, std::span<const double> raw) {
  return encode(params.text, raw).y;
}

std::vector<double> embed_visual(const ModelParams& params, int granularity,
                                 std::span<const double> raw) {
  return encode(params.visual.at(static_cast<std::size_t>(granularity)), raw).y;
}

std::vector<double> mean_embedding(const std::vector<std::vector<double>>& embeddings) {
  if (embeddings.empty()) throw DataError("no embeddings to average");
  std::vector<double> mean(embeddings.front().size(), 0.0);
  for (const auto& e : embeddings)
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += e[i];
  double n2 = 0;
  for (double& v : mean) {
    v /= static_cast<double>(embeddings.size());
    n2 += v * v;
  }
  const double n = std::sqrt(n2);
  if (!(n > 1e-12)) throw NumericError("degenerate embedding: mean of frame embeddings is zero");
  for (double& v : mean) v /= n;
  return mean;
}

namespace {

Tensor encoder_tensor(const EncoderParams& e) {
  Tensor t{{static_cast<uint32_t>(e.out_dim()), static_cast<uint32_t>(e.in_dim() + 1)}, {}};
  for (int r = 0; r < e.out_dim(); ++r) {
    for (double v : e.weight.row(r)) t.values.push_back(static_cast<float>(v));
    t.values.push_back(static_cast<float>(e.bias[static_cast<std::size_t>(r)]));
  }
  return t;
}

EncoderParams encoder_from(const Tensor& t) {
  if (t.dims.size() != 2 || t.dims[1] < 2) throw DataError("bad encoder section shape");
  EncoderParams e(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]) - 1);
  std::size_t p = 0;
  for (int r = 0; r < e.out_dim(); ++r) {
    for (double& v : e.weight.row(r)) v = t.values[p++];
    e.bias[static_cast<std::size_t>(r)] = t.values[p++];
  }
  return e;
}

constexpr float kCheckpointVersion = 1;

const Tensor& require(const NamedTensors& s, const std::string& name) {
  const Tensor* t = find_section(s, name);
  if (t == nullptr) throw DataError("checkpoint is missing section '" + name + "'");
  return *t;
}

}  // namespace

NamedTensors model_to_sections(const Model& model) {
  const ModelConfig& c = model.config;
  const Granularities& g = c.granularities;
  NamedTensors out;
  out.emplace_back(
      "meta",
      Tensor{{14},
             {kCheckpointVersion, static_cast<float>(c.embed_dim),
              static_cast<float>(c.text_dim), static_cast<float>(c.grid),
              static_cast<float>(c.num_classes), c.shared_id_head ? 1.f : 0.f,
              g.context ? 1.f : 0.f, g.motion ? 1.f : 0.f, g.local ? 1.f : 0.f,
              g.prompt ? 1.f : 0.f, static_cast<float>(c.motion.out_width),
              static_cast<float>(c.motion.out_height), static_cast<float>(c.motion.thickness),
              static_cast<float>(c.motion.overlap_threshold)}});
  out.emplace_back("text", encoder_tensor(model.params.text));
  const auto names = g.visual_names();
  for (std::size_t k = 0; k < names.size(); ++k)
    out.emplace_back("vis_" + names[k], encoder_tensor(model.params.visual[k]));
  const auto& heads = model.params.head.weights;
  Tensor head{{static_cast<uint32_t>(heads.size()), static_cast<uint32_t>(heads[0].rows),
               static_cast<uint32_t>(heads[0].cols)},
              {}};
  for (const auto& w : heads)
    for (double v : w.values) head.values.push_back(static_cast<float>(v));
  out.emplace_back("id_head", std::move(head));
  out.emplace_back("log_tau",
                   Tensor{{1}, {static_cast<float>(model.params.temperature.log_tau)}});
  return out;
}

Model model_from_sections(const NamedTensors& sections) {
  const Tensor& meta = require(sections, "meta");
  if (meta.values.size() != 14 || meta.values[0] != kCheckpointVersion)
    throw DataError("unsupported checkpoint metadata");
  const auto& mv = meta.values;
  Model m;
  ModelConfig& c = m.config;
  c.embed_dim = static_cast<int>(mv[1]);
  c.text_dim = static_cast<int>(mv[2]);
  c.grid = static_cast<int>(mv[3]);
  c.num_classes = static_cast<int>(mv[4]);
  c.shared_id_head = mv[5] != 0;
  c.granularities = {mv[6] != 0, mv[7] != 0, mv[8] != 0, mv[9] != 0};
  c.motion.out_width = static_cast<int>(mv[10]);
  c.motion.out_height = static_cast<int>(mv[11]);
  c.motion.thickness = mv[12];
  c.motion.overlap_threshold = mv[13];

  m.params.text = encoder_from(require(sections, "text"));
  for (const auto& name : c.granularities.visual_names())
    m.params.visual.push_back(encoder_from(require(sections, "vis_" + name)));
  const Tensor& head = require(sections, "id_head");
  if (head.dims.size() != 3) throw DataError("bad id_head section shape");
  std::size_t p = 0;
  for (uint32_t h = 0; h < head.dims[0]; ++h) {
    Matrix w(static_cast<int>(head.dims[1]), static_cast<int>(head.dims[2]));
    for (double& v : w.values) v = head.values[p++];
    m.params.head.weights.push_back(std::move(w));
  }
  m.params.temperature.log_tau = require(sections, "log_tau").values.at(0);

  if (m.params.text.out_dim() != c.embed_dim || m.params.text.in_dim() != c.text_dim)
    throw DataError("text encoder shape disagrees with checkpoint metadata");
  return m;
}

}  // namespace omg
