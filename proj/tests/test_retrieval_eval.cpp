#include <doctest.h>

#include <json.hpp>

#include "omg/commands.hpp"
#include "omg/evaluation.hpp"
#include "omg/retrieval.hpp"
#include "support.hpp"

using namespace omg;

namespace {

ScoreMatrix matrix(int q, int g, std::vector<double> v) { return {q, g, std::move(v)}; }

}  // namespace

TEST_CASE("reciprocal rank and recall on worked ranks") {
  const std::vector<int> r{1, 2, 4};
  CHECK(mrr(r) == 7.0 / 12.0);
  CHECK(mrr(std::vector<int>{1, 1, 1}) == 1.0);
  CHECK(recall_at_k(r, 5) == 1.0);
  CHECK(recall_at_k(std::vector<int>{6, 7}, 5) == 0.0);
  CHECK(recall_at_k(std::vector<int>{1, 10, 11}, 10) == 2.0 / 3.0);
  CHECK_THROWS_AS(mrr(std::vector<int>{}), DataError);
  CHECK_THROWS_AS(mrr(std::vector<int>{0}), DataError);
}

TEST_CASE("ranking ties resolve to the lower gallery index") {
  const auto fused = matrix(3, 3, {0.9, 0.1, 0.2,    // truth 0 strictly best
                                   0.5, 0.5, 0.1,    // truth 1 tied with index 0
                                   0.9, 0.8, 0.1});  // truth 2 lowest
  const std::vector<int> truth{0, 1, 2};
  const RankedResult r = rank_queries(fused, truth);
  CHECK(r.ranks == std::vector<int>{1, 2, 3});
  CHECK(r.order[1] == std::vector<int>{0, 1, 2});
}

TEST_CASE("ranking by gallery ids") {
  const auto fused = matrix(1, 3, {0.1, 0.7, 0.3});
  const std::vector<std::string> ids{"a", "b", "c"};
  CHECK(rank_queries(fused, ids, {"c"}).ranks == std::vector<int>{2});
  CHECK_THROWS_AS(rank_queries(fused, ids, {"zzz"}), DataError);
}

TEST_CASE("fusion averages the pair slices") {
  SimilarityTensor t(2, 2, 15);
  Rng rng(1);
  for (double& v : t.values) v = rng.uniform() * 2 - 1;
  const ScoreMatrix f = fuse_similarities(t);
  for (int q = 0; q < 2; ++q)
    for (int g = 0; g < 2; ++g) {
      double s = 0;
      for (int p = 0; p < 15; ++p) s += t.at(q, g, p);
      CHECK(f.at(q, g) == doctest::Approx(s / 15).epsilon(1e-15));
    }

  SimilarityTensor pm(1, 3, 2);
  for (int g = 0; g < 3; ++g) {
    pm.at(0, g, 0) = 0.25 * (g + 1);
    pm.at(0, g, 1) = -0.25 * (g + 1);
  }
  for (double v : fuse_similarities(pm).values) CHECK(v == 0.0);

  SimilarityTensor same(1, 2, 4);
  for (int g = 0; g < 2; ++g)
    for (int p = 0; p < 4; ++p) same.at(0, g, p) = 0.3 + g;
  CHECK(fuse_similarities(same).at(0, 1) == doctest::Approx(1.3).epsilon(1e-15));
}

TEST_CASE("metrics agree with a brute-force scan on small galleries") {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const int G = 1 + static_cast<int>(rng.below(6));
    const int Q = 1 + static_cast<int>(rng.below(5));
    ScoreMatrix m{Q, G, std::vector<double>(static_cast<std::size_t>(Q * G))};
    for (double& v : m.values) v = static_cast<double>(rng.below(4));  // many ties
    std::vector<int> truth;
    for (int q = 0; q < Q; ++q) truth.push_back(static_cast<int>(rng.below(G)));
    const auto r = rank_queries(m, truth);
    double rr = 0;
    for (int q = 0; q < Q; ++q) {
      const std::vector<double> row(m.values.begin() + q * G, m.values.begin() + (q + 1) * G);
      const int expect = testing::brute_force_rank(row, truth[q]);
      CHECK(r.ranks[q] == expect);
      rr += 1.0 / expect;
    }
    CHECK(mrr(r) == doctest::Approx(rr / Q).epsilon(1e-15));
  }
}

TEST_CASE("similarity-tensor evaluation reports 7/12") {
  // 3 queries, 4 gallery items, 1 pair; truth ranks 1, 2 and 4.
  Tensor t{{3, 4, 1}, {0.9f, 0.1f, 0.2f, 0.3f,   //
                       0.8f, 0.7f, 0.1f, 0.0f,   //
                       0.5f, 0.6f, 0.7f, 0.1f}};
  const auto j = nlohmann::json::parse(run_eval_tensor(t, {}, {0, 1, 3}, {}));
  CHECK(j["mrr"].get<double>() == 7.0 / 12.0);
  CHECK(j["recall@5"].get<double>() == 1.0);
  CHECK(j["per_query"][2]["rank"] == 4);
  CHECK(j["per_query"][0]["top"][0] == "g0");
}

TEST_CASE("similarity-tensor evaluation rejects bad shapes and truth") {
  CHECK_THROWS_AS(run_eval_tensor(Tensor{{2, 2}, {1, 2, 3, 4}}, {}, {}, {}), DataError);
  CHECK_THROWS_AS(run_eval_tensor(Tensor{{1, 2, 1}, {1, 2}}, {}, {5}, {}), DataError);
}

TEST_CASE("mean embedding renormalizes and rejects antipodes") {
  const auto m = mean_embedding({{1, 0}, {0, 1}});
  CHECK(m[0] == doctest::Approx(std::sqrt(0.5)));
  CHECK(mean_embedding({{0.6, 0.8}, {0.6, 0.8}}) == std::vector<double>{0.6, 0.8});
  CHECK_THROWS_AS(mean_embedding({{1, 0}, {-1, 0}}), NumericError);
}
