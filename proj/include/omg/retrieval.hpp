#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace omg {

// Q x G x P similarities, P = N_t * N_v granularity pairs, stored
// [query][gallery][pair].
struct SimilarityTensor {
  int queries = 0;
  int gallery = 0;
  int pairs = 0;
  std::vector<double> values;

  SimilarityTensor() = default;
  SimilarityTensor(int q, int g, int p)
      : queries(q), gallery(g), pairs(p), values(static_cast<std::size_t>(q) * g * p, 0.0) {}

  double& at(int q, int g, int p) {
    return values[(static_cast<std::size_t>(q) * gallery + g) * pairs + p];
  }
  double at(int q, int g, int p) const {
    return values[(static_cast<std::size_t>(q) * gallery + g) * pairs + p];
  }
};

// Q x G row-major.
struct ScoreMatrix {
  int queries = 0;
  int gallery = 0;
  std::vector<double> values;

  double at(int q, int g) const { return values[static_cast<std::size_t>(q) * gallery + g]; }
  double& at(int q, int g) { return values[static_cast<std::size_t>(q) * gallery + g]; }
};

// Weighted mean over the pair axis; empty `weights` means uniform.
ScoreMatrix fuse_similarities(const SimilarityTensor& t, std::span<const double> weights = {});

struct RankedResult {
  std::vector<std::vector<int>> order;  // per query, gallery indices best first
  std::vector<int> ranks;               // 1-based rank of the true match
};

// Descending by score, ties by ascending gallery index.
RankedResult rank_queries(const ScoreMatrix& fused, std::span<const int> truth,
                          int threads = 1);
RankedResult rank_queries(const ScoreMatrix& fused, const std::vector<std::string>& gallery_ids,
                          const std::vector<std::string>& truth_ids, int threads = 1);

double mrr(std::span<const int> ranks);
double recall_at_k(std::span<const int> ranks, int k);

inline double mrr(const RankedResult& r) { return mrr(r.ranks); }
inline double recall_at_k(const RankedResult& r, int k) { return recall_at_k(r.ranks, k); }

}  // namespace omg
