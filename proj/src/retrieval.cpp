#include "omg/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "omg/parallel.hpp"
#include "omg/types.hpp"

namespace omg {

ScoreMatrix fuse_similarities(const SimilarityTensor& t, std::span<const double> weights) {
  if (t.queries < 1 || t.gallery < 1 || t.pairs < 1)
    throw DataError("similarity tensor has an empty axis");
  if (!weights.empty() && static_cast<int>(weights.size()) != t.pairs)
    throw DataError("fusion weight count must equal the number of granularity pairs");
  double wsum = 0;
  for (double w : weights) wsum += w;
  if (!weights.empty() && !(wsum > 0)) throw DataError("fusion weights must sum to > 0");

  ScoreMatrix out{t.queries, t.gallery,
                  std::vector<double>(static_cast<std::size_t>(t.queries) * t.gallery, 0.0)};
  for (int q = 0; q < t.queries; ++q)
    for (int g = 0; g < t.gallery; ++g) {
      double s = 0;
      for (int p = 0; p < t.pairs; ++p)
        s += (weights.empty() ? 1.0 : weights[static_cast<std::size_t>(p)]) * t.at(q, g, p);
      out.at(q, g) = s / (weights.empty() ? t.pairs : wsum);
    }
  return out;
}

RankedResult rank_queries(const ScoreMatrix& fused, std::span<const int> truth, int threads) {
  if (static_cast<int>(truth.size()) != fused.queries)
    throw DataError("one truth index per query required");
  for (int t : truth)
    if (t < 0 || t >= fused.gallery) throw DataError("truth index outside the gallery");
  RankedResult r;
  r.order.resize(static_cast<std::size_t>(fused.queries));
  r.ranks.resize(static_cast<std::size_t>(fused.queries));
  parallel_for(static_cast<std::size_t>(fused.queries), threads, [&](std::size_t qi) {
    const int q = static_cast<int>(qi);
    std::vector<int> order(static_cast<std::size_t>(fused.gallery));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fused.at(q, a) > fused.at(q, b); });
    const auto it = std::find(order.begin(), order.end(), truth[qi]);
    r.ranks[qi] = static_cast<int>(it - order.begin()) + 1;
    r.order[qi] = std::move(order);
  });
  return r;
}

RankedResult rank_queries(const ScoreMatrix& fused, const std::vector<std::string>& gallery_ids,
                          const std::vector<std::string>& truth_ids, int threads) {
  if (static_cast<int>(gallery_ids.size()) != fused.gallery)
    throw DataError("gallery id count does not match the score matrix");
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < gallery_ids.size(); ++i)
    index.emplace(gallery_ids[i], static_cast<int>(i));
  std::vector<int> truth;
  for (const auto& id : truth_ids) {
    auto it = index.find(id);
    if (it == index.end()) throw DataError("unknown truth id '" + id + "'");
    truth.push_back(it->second);
  }
  return rank_queries(fused, truth, threads);
}

double mrr(std::span<const int> ranks) {
  if (ranks.empty()) throw DataError("no queries to score");
  double s = 0;
  for (int r : ranks) {
    if (r < 1) throw DataError("ranks are 1-based");
    s += 1.0 / r;
  }
  return s / static_cast<double>(ranks.size());
}

double recall_at_k(std::span<const int> ranks, int k) {
  if (ranks.empty()) throw DataError("no queries to score");
  const auto hits = std::count_if(ranks.begin(), ranks.end(), [k](int r) { return r <= k; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

}  // namespace omg
