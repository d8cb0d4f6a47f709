#include "omg/evaluation.hpp"

#include <json.hpp>

#include "omg/geometry.hpp"
#include "omg/parallel.hpp"

namespace omg {

std::vector<std::vector<double>> multi_frame_embedding(const Model& model,
                                                       const PreparedTrack& track, int frames) {
  if (frames < 1) throw DataError("multi-frame sample count must be >= 1");
  const Granularities& g = model.config.granularities;
  const auto idx = uniform_indices(track.frame_count, static_cast<std::size_t>(frames));
  const int nv = g.visual_count();
  std::vector<std::vector<std::vector<double>>> per_gran(static_cast<std::size_t>(nv));
  for (std::size_t f : idx) {
    const auto raw = select_visual(track, f, g);
    for (int k = 0; k < nv; ++k)
      per_gran[static_cast<std::size_t>(k)].push_back(
          embed_visual(model.params, k, raw[static_cast<std::size_t>(k)]));
  }
  std::vector<std::vector<double>> out;
  for (auto& e : per_gran) out.push_back(e.size() == 1 ? e.front() : mean_embedding(e));
  return out;
}

std::vector<std::vector<double>> query_embedding(const Model& model, const PreparedTrack& track) {
  std::vector<std::vector<double>> out;
  for (const auto& raw : select_text(track, model.config.granularities))
    out.push_back(embed_text(model.params, raw));
  return out;
}

Evaluation evaluate_similarities(const SimilarityTensor& sims,
                                 const std::vector<std::string>& query_ids,
                                 const std::vector<std::string>& gallery_ids,
                                 const std::vector<int>& truth, const EvalOptions& options) {
  if (static_cast<int>(query_ids.size()) != sims.queries ||
      static_cast<int>(gallery_ids.size()) != sims.gallery)
    throw DataError("id lists do not match the similarity tensor shape");
  Evaluation ev;
  ev.query_ids = query_ids;
  ev.gallery_ids = gallery_ids;
  ev.similarities = sims;
  ev.fused = fuse_similarities(sims, options.fusion_weights);
  ev.ranked = rank_queries(ev.fused, truth, options.threads);
  ev.mrr = mrr(ev.ranked);
  ev.recall5 = recall_at_k(ev.ranked, 5);
  ev.recall10 = recall_at_k(ev.ranked, 10);
  return ev;
}

Evaluation evaluate(const Model& model, const std::vector<PreparedTrack>& tracks,
                    const EvalOptions& options) {
  if (tracks.empty()) throw DataError("nothing to evaluate");
  const std::size_t n = tracks.size();
  std::vector<std::vector<std::vector<double>>> text(n), vis(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    text[i] = query_embedding(model, tracks[i]);
    vis[i] = multi_frame_embedding(model, tracks[i], options.mft);
  });
  const int nt = static_cast<int>(text[0].size());
  const int nv = static_cast<int>(vis[0].size());
  SimilarityTensor sims(static_cast<int>(n), static_cast<int>(n), nt * nv);
  parallel_for(n, options.threads, [&](std::size_t q) {
    for (std::size_t g = 0; g < n; ++g)
      for (int j = 0; j < nt; ++j)
        for (int k = 0; k < nv; ++k) {
          const auto& a = text[q][static_cast<std::size_t>(j)];
          const auto& b = vis[g][static_cast<std::size_t>(k)];
          double s = 0;
          for (std::size_t d = 0; d < a.size(); ++d) s += a[d] * b[d];
          sims.at(static_cast<int>(q), static_cast<int>(g), j * nv + k) = s;
        }
  });
  std::vector<std::string> ids;
  std::vector<int> truth;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(tracks[i].id);
    truth.push_back(static_cast<int>(i));
  }
  return evaluate_similarities(sims, ids, ids, truth, options);
}

std::string results_to_json(const Evaluation& eval) {
  nlohmann::ordered_json j;
  j["mrr"] = eval.mrr;
  j["recall@5"] = eval.recall5;
  j["recall@10"] = eval.recall10;
  auto per_query = nlohmann::ordered_json::array();
  for (std::size_t q = 0; q < eval.ranked.ranks.size(); ++q) {
    nlohmann::ordered_json e;
    e["query_id"] = eval.query_ids[q];
    e["rank"] = eval.ranked.ranks[q];
    auto top = nlohmann::ordered_json::array();
    const auto& order = eval.ranked.order[q];
    for (std::size_t r = 0; r < order.size() && r < 10; ++r)
      top.push_back(eval.gallery_ids[static_cast<std::size_t>(order[r])]);
    e["top"] = std::move(top);
    per_query.push_back(std::move(e));
  }
  j["per_query"] = std::move(per_query);
  return j.dump(1) + "\n";
}

}  // namespace omg
