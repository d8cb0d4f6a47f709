#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "omg/encoder.hpp"

namespace omg {

inline constexpr double kInitialTemperature = 0.07;

// tau = exp(log_tau), so tau > 0 for every finite log_tau.
struct Temperature {
  double log_tau = std::log(kInitialTemperature);
  double tau() const { return std::exp(log_tau); }
  static Temperature from_tau(double tau) { return {std::log(tau)}; }
};

struct LossWeights {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
};

// Per-granularity embeddings for a batch of M text-vehicle pairs.
// text(i, j) is granularity j of query i; visual(i, k) granularity k of
// vehicle i. Storage is [pair][granularity][dim].
struct EmbeddingBatch {
  int pairs = 0;
  int text_granularities = 0;
  int visual_granularities = 0;
  int dim = 0;
  std::vector<double> text_values;
  std::vector<double> visual_values;

  EmbeddingBatch() = default;
  EmbeddingBatch(int m, int nt, int nv, int d);

  std::span<double> text(int i, int j) { return slot(text_values, i * text_granularities + j); }
  std::span<const double> text(int i, int j) const {
    return slot(text_values, i * text_granularities + j);
  }
  std::span<double> visual(int i, int k) {
    return slot(visual_values, i * visual_granularities + k);
  }
  std::span<const double> visual(int i, int k) const {
    return slot(visual_values, i * visual_granularities + k);
  }

 private:
  std::span<double> slot(std::vector<double>& v, int s) {
    return {v.data() + static_cast<std::size_t>(s) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> slot(const std::vector<double>& v, int s) const {
    return {v.data() + static_cast<std::size_t>(s) * dim, static_cast<std::size_t>(dim)};
  }
};

// Classifier over vehicle IDs. One matrix shared by all visual granularities,
// or one per granularity.
struct IdHead {
  std::vector<Matrix> weights;  // each num_classes x dim

  IdHead() = default;
  IdHead(int num_classes, int dim, int heads = 1);

  int num_classes() const { return weights.empty() ? 0 : weights.front().rows; }
  const Matrix& for_granularity(int k) const {
    return weights.size() == 1 ? weights.front() : weights[static_cast<std::size_t>(k)];
  }
};

struct LossValue {
  double value = 0;
  EmbeddingBatch grad;  // dL/d embeddings
  double grad_log_tau = 0;
  std::vector<Matrix> grad_head;  // matches IdHead::weights when present
};

struct LossBundle {
  double info_t2i = 0;
  double info_i2t = 0;
  double info = 0;
  double id = 0;
  double total = 0;
  EmbeddingBatch grad;
  double grad_log_tau = 0;
  std::vector<Matrix> grad_head;
};

struct LossOptions {
  // Reject embeddings whose norm deviates from 1 by more than 1e-6.
  bool require_unit_norm = true;
};

double cosine_similarity(std::span<const double> u, std::span<const double> v);

LossValue infonce_t2i(const EmbeddingBatch& batch, Temperature temp,
                      const LossOptions& opts = {});
LossValue infonce_i2t(const EmbeddingBatch& batch, Temperature temp,
                      const LossOptions& opts = {});
// Mean of the two directions.
LossValue infonce_total(const EmbeddingBatch& batch, Temperature temp,
                        const LossOptions& opts = {});

// Mean cross-entropy of softmax(head * v) against labels over M x N_v.
LossValue id_loss(const EmbeddingBatch& batch, std::span<const int> labels,
                  const IdHead& head, const LossOptions& opts = {});

LossBundle total_loss(const EmbeddingBatch& batch, std::span<const int> labels,
                      Temperature temp, const IdHead& head, LossWeights weights,
                      const LossOptions& opts = {});

}  // namespace omg
