#include "omg/granular_loss.hpp"

#include <algorithm>
#include <string>

#include "omg/types.hpp"

namespace omg {

EmbeddingBatch::EmbeddingBatch(int m, int nt, int nv, int d)
    : pairs(m),
      text_granularities(nt),
      visual_granularities(nv),
      dim(d),
      text_values(static_cast<std::size_t>(m) * nt * d, 0.0),
      visual_values(static_cast<std::size_t>(m) * nv * d, 0.0) {}

IdHead::IdHead(int num_classes, int dim, int heads) {
  weights.assign(static_cast<std::size_t>(heads), Matrix(num_classes, dim));
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_batch(const EmbeddingBatch& b, const LossOptions& opts) {
  if (b.pairs < 1) throw DataError("batch must contain at least one pair");
  if (b.text_granularities < 1 || b.visual_granularities < 1 || b.dim < 1)
    throw DataError("granularity counts and dimension must be >= 1");
  if (!opts.require_unit_norm) return;
  auto check = [](std::span<const double> v) {
    const double n = std::sqrt(dot(v, v));
    if (!(std::abs(n - 1.0) <= 1e-6)) throw DataError("embedding is not unit-norm");
  };
  for (int i = 0; i < b.pairs; ++i) {
    for (int j = 0; j < b.text_granularities; ++j) check(b.text(i, j));
    for (int k = 0; k < b.visual_granularities; ++k) check(b.visual(i, k));
  }
}

enum class Direction { kTextToImage, kImageToText };

// Sum over (j, k) of the InfoNCE terms, each anchor i contrasted with every
// candidate n in the batch. Gradients are scaled by `scale` and accumulated.
double contrast(const EmbeddingBatch& b, double tau, Direction dir, double scale,
                EmbeddingBatch& grad, double& grad_log_tau) {
  const int M = b.pairs;
  std::vector<double> logits(static_cast<std::size_t>(M));
  double total = 0;
  for (int j = 0; j < b.text_granularities; ++j) {
    for (int k = 0; k < b.visual_granularities; ++k) {
      for (int i = 0; i < M; ++i) {
        auto anchor = dir == Direction::kTextToImage ? b.text(i, j) : b.visual(i, k);
        for (int n = 0; n < M; ++n) {
          auto cand = dir == Direction::kTextToImage ? b.visual(n, k) : b.text(n, j);
          logits[static_cast<std::size_t>(n)] = dot(anchor, cand) / tau;
        }
        const double mx = *std::max_element(logits.begin(), logits.end());
        double z = 0;
        for (double l : logits) z += std::exp(l - mx);
        const double log_z = mx + std::log(z);
        total += log_z - logits[static_cast<std::size_t>(i)];

        auto g_anchor = dir == Direction::kTextToImage ? grad.text(i, j) : grad.visual(i, k);
        for (int n = 0; n < M; ++n) {
          const double l = logits[static_cast<std::size_t>(n)];
          const double p = std::exp(l - log_z);
          // d(term)/d(logit_n) = p_n - [n == i]
          const double dl = scale * (p - (n == i ? 1.0 : 0.0));
          if (dl == 0) continue;
          grad_log_tau -= dl * l;
          auto cand = dir == Direction::kTextToImage ? b.visual(n, k) : b.text(n, j);
          auto g_cand = dir == Direction::kTextToImage ? grad.visual(n, k) : grad.text(n, j);
          const double ds = dl / tau;
          for (int d = 0; d < b.dim; ++d) {
            g_anchor[static_cast<std::size_t>(d)] += ds * cand[static_cast<std::size_t>(d)];
            g_cand[static_cast<std::size_t>(d)] += ds * anchor[static_cast<std::size_t>(d)];
          }
        }
      }
    }
  }
  return total * scale;
}

LossValue directional(const EmbeddingBatch& b, Temperature temp, Direction dir,
                      const LossOptions& opts) {
  check_batch(b, opts);
  const double tau = temp.tau();
  if (!(tau > 0) || !std::isfinite(tau)) throw NumericError("temperature must be positive");
  LossValue out;
  out.grad = EmbeddingBatch(b.pairs, b.text_granularities, b.visual_granularities, b.dim);
  const double scale =
      1.0 / (static_cast<double>(b.pairs) * b.text_granularities * b.visual_granularities);
  out.value = contrast(b, tau, dir, scale, out.grad, out.grad_log_tau);
  return out;
}

void add_into(EmbeddingBatch& dst, const EmbeddingBatch& src, double w) {
  for (std::size_t i = 0; i < dst.text_values.size(); ++i)
    dst.text_values[i] += w * src.text_values[i];
  for (std::size_t i = 0; i < dst.visual_values.size(); ++i)
    dst.visual_values[i] += w * src.visual_values[i];
}

}  // namespace

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw DataError("cosine similarity of vectors of unequal size");
  const double nu = std::sqrt(dot(u, u));
  const double nv = std::sqrt(dot(v, v));
  if (!(nu > 0) || !(nv > 0)) throw DataError("cosine similarity of a zero vector");
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

LossValue infonce_t2i(const EmbeddingBatch& batch, Temperature temp,
                      const LossOptions& opts) {
  return directional(batch, temp, Direction::kTextToImage, opts);
}

LossValue infonce_i2t(const EmbeddingBatch& batch, Temperature temp,
                      const LossOptions& opts) {
  return directional(batch, temp, Direction::kImageToText, opts);
}

LossValue infonce_total(const EmbeddingBatch& batch, Temperature temp,
                        const LossOptions& opts) {
  LossValue a = infonce_t2i(batch, temp, opts);
  LossValue b = infonce_i2t(batch, temp, opts);
  LossValue out;
  out.value = (a.value + b.value) / 2;
  out.grad = EmbeddingBatch(batch.pairs, batch.text_granularities,
                            batch.visual_granularities, batch.dim);
  add_into(out.grad, a.grad, 0.5);
  add_into(out.grad, b.grad, 0.5);
  out.grad_log_tau = (a.grad_log_tau + b.grad_log_tau) / 2;
  return out;
}

LossValue id_loss(const EmbeddingBatch& batch, std::span<const int> labels,
                  const IdHead& head, const LossOptions& opts) {
  check_batch(batch, opts);
  if (static_cast<int>(labels.size()) != batch.pairs)
    throw DataError("one label per pair required");
  if (head.weights.empty()) throw DataError("ID head has no weights");
  if (head.weights.size() != 1 &&
      static_cast<int>(head.weights.size()) != batch.visual_granularities)
    throw DataError("ID head count must be 1 or N_v");
  const int C = head.num_classes();
  for (int y : labels)
    if (y < 0 || y >= C)
      throw DataError("label " + std::to_string(y) + " outside [0, " + std::to_string(C) + ")");

  LossValue out;
  out.grad = EmbeddingBatch(batch.pairs, batch.text_granularities,
                            batch.visual_granularities, batch.dim);
  for (const auto& w : head.weights) out.grad_head.emplace_back(w.rows, w.cols);
  const double scale = 1.0 / (static_cast<double>(batch.pairs) * batch.visual_granularities);
  std::vector<double> logits(static_cast<std::size_t>(C));
  double total = 0;
  for (int i = 0; i < batch.pairs; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    for (int k = 0; k < batch.visual_granularities; ++k) {
      const std::size_t h = head.weights.size() == 1 ? 0 : static_cast<std::size_t>(k);
      const Matrix& W = head.weights[h];
      if (W.cols != batch.dim) throw DataError("ID head dimension mismatch");
      const auto v = batch.visual(i, k);
      for (int c = 0; c < C; ++c) logits[static_cast<std::size_t>(c)] = dot(W.row(c), v);
      const double mx = *std::max_element(logits.begin(), logits.end());
      double z = 0;
      for (double l : logits) z += std::exp(l - mx);
      const double log_z = mx + std::log(z);
      total += log_z - logits[static_cast<std::size_t>(y)];

      auto gv = out.grad.visual(i, k);
      Matrix& gW = out.grad_head[h];
      for (int c = 0; c < C; ++c) {
        const double p = std::exp(logits[static_cast<std::size_t>(c)] - log_z);
        const double dl = scale * (p - (c == y ? 1.0 : 0.0));
        auto wrow = W.row(c);
        auto grow = gW.row(c);
        for (int d = 0; d < batch.dim; ++d) {
          grow[static_cast<std::size_t>(d)] += dl * v[static_cast<std::size_t>(d)];
          gv[static_cast<std::size_t>(d)] += dl * wrow[static_cast<std::size_t>(d)];
        }
      }
    }
  }
  out.value = total * scale;
  return out;
}

LossBundle total_loss(const EmbeddingBatch& batch, std::span<const int> labels,
                      Temperature temp, const IdHead& head, LossWeights weights,
                      const LossOptions& opts) {
  if (weights.lambda1 < 0 || weights.lambda2 < 0)
    throw DataError("loss weights must be non-negative");
  LossValue t2i = infonce_t2i(batch, temp, opts);
  LossValue i2t = infonce_i2t(batch, temp, opts);
  LossValue id = id_loss(batch, labels, head, opts);

  LossBundle out;
  out.info_t2i = t2i.value;
  out.info_i2t = i2t.value;
  out.info = (t2i.value + i2t.value) / 2;
  out.id = id.value;
  out.total = weights.lambda1 * out.info + weights.lambda2 * out.id;
  out.grad = EmbeddingBatch(batch.pairs, batch.text_granularities,
                            batch.visual_granularities, batch.dim);
  add_into(out.grad, t2i.grad, weights.lambda1 / 2);
  add_into(out.grad, i2t.grad, weights.lambda1 / 2);
  add_into(out.grad, id.grad, weights.lambda2);
  out.grad_log_tau = weights.lambda1 * (t2i.grad_log_tau + i2t.grad_log_tau) / 2;
  out.grad_head = std::move(id.grad_head);
  for (auto& g : out.grad_head)
    for (double& v : g.values) v *= weights.lambda2;
  if (!std::isfinite(out.total)) throw NumericError("non-finite loss");
  return out;
}

}  // namespace omg
