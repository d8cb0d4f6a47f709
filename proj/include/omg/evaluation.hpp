#pragma once

#include <string>
#include <vector>

#include "omg/dataset.hpp"
#include "omg/model.hpp"
#include "omg/retrieval.hpp"

namespace omg {

struct EvalOptions {
  int mft = 1;  // frames averaged per gallery track; 1 = middle frame only
  int threads = 1;
  std::vector<double> fusion_weights;  // empty = uniform mean
};

// Visual embeddings of a gallery track, one per enabled granularity: the
// embeddings of `frames` uniformly sampled frames averaged and renormalized.
std::vector<std::vector<double>> multi_frame_embedding(const Model& model,
                                                       const PreparedTrack& track, int frames);

std::vector<std::vector<double>> query_embedding(const Model& model, const PreparedTrack& track);

struct Evaluation {
  std::vector<std::string> query_ids;
  std::vector<std::string> gallery_ids;
  SimilarityTensor similarities;
  ScoreMatrix fused;
  RankedResult ranked;
  double mrr = 0;
  double recall5 = 0;
  double recall10 = 0;
};

// Every track is both a query (its text) and a gallery item (its pixels);
// query i's true match is gallery item i.
Evaluation evaluate(const Model& model, const std::vector<PreparedTrack>& tracks,
                    const EvalOptions& options = {});

// Ranks and metrics from a ready similarity tensor.
Evaluation evaluate_similarities(const SimilarityTensor& sims,
                                 const std::vector<std::string>& query_ids,
                                 const std::vector<std::string>& gallery_ids,
                                 const std::vector<int>& truth,
                                 const EvalOptions& options = {});

// {"mrr", "recall@5", "recall@10", "per_query": [{"query_id", "rank", "top"}]}
std::string results_to_json(const Evaluation& eval);

}  // namespace omg
