#include <doctest.h>

#include <cmath>

#include "omg/granular_loss.hpp"
#include "support.hpp"

using namespace omg;

namespace {

// Every text and visual embedding of pair i is the same unit vector e_i.
EmbeddingBatch basis_batch(int m, int nt, int nv) {
  EmbeddingBatch b(m, nt, nv, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < nt; ++j) b.text(i, j)[i] = 1;
    for (int k = 0; k < nv; ++k) b.visual(i, k)[i] = 1;
  }
  return b;
}

// All embeddings identical, so every similarity is 1.
EmbeddingBatch uniform_batch(int m, int nt, int nv, int d = 3) {
  EmbeddingBatch b(m, nt, nv, d);
  for (double& v : b.text_values) v = 0;
  for (double& v : b.visual_values) v = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < nt; ++j) b.text(i, j)[0] = 1;
    for (int k = 0; k < nv; ++k) b.visual(i, k)[0] = 1;
  }
  return b;
}

EmbeddingBatch random_batch(int m, int nt, int nv, int d, Rng& rng) {
  EmbeddingBatch b(m, nt, nv, d);
  auto normalize_slots = [&](std::vector<double>& values) {
    testing::fill_normal(values, rng, 1.0);
    for (std::size_t s = 0; s < values.size(); s += static_cast<std::size_t>(d)) {
      double n = 0;
      for (int t = 0; t < d; ++t) n += values[s + t] * values[s + t];
      n = std::sqrt(n);
      for (int t = 0; t < d; ++t) values[s + t] /= n;
    }
  };
  normalize_slots(b.text_values);
  normalize_slots(b.visual_values);
  return b;
}

const double kWorked = std::log(1 + std::exp(-1.0));  // 0.313262...

}  // namespace

TEST_CASE("cosine similarity") {
  const std::vector<double> u{1, 2, 2}, w{-1, -2, -2}, o{2, -1, 0};
  CHECK(cosine_similarity(u, u) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(u, w) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(cosine_similarity(u, o) == 0.0);
  CHECK_THROWS_AS(cosine_similarity(u, std::vector<double>{0, 0, 0}), DataError);
}

TEST_CASE("single pair has zero contrastive loss") {
  const auto b = basis_batch(1, 5, 3);
  CHECK(infonce_t2i(b, Temperature::from_tau(0.3)).value == 0.0);
  CHECK(infonce_i2t(b, Temperature::from_tau(0.3)).value == 0.0);
}

TEST_CASE("uniform similarities give ln M") {
  for (int m : {2, 3, 4, 8}) {
    const auto b = uniform_batch(m, 2, 3);
    CHECK(std::abs(infonce_t2i(b, Temperature::from_tau(0.2)).value - std::log(m)) < 1e-12);
    CHECK(std::abs(infonce_i2t(b, Temperature::from_tau(0.7)).value - std::log(m)) < 1e-12);
  }
}

TEST_CASE("worked two-pair case") {
  const auto b = basis_batch(2, 1, 1);
  const Temperature unit = Temperature::from_tau(1.0);
  CHECK(infonce_t2i(b, unit).value == doctest::Approx(kWorked).epsilon(1e-14));
  CHECK(infonce_t2i(b, unit).value == doctest::Approx(0.313262).epsilon(1e-6));
  CHECK(infonce_i2t(b, unit).value == doctest::Approx(kWorked).epsilon(1e-14));
  CHECK(infonce_total(b, unit).value == doctest::Approx(kWorked).epsilon(1e-14));
}

TEST_CASE("granularity averaging of the similarity") {
  // Repeating identical granularities leaves the loss unchanged.
  const Temperature unit = Temperature::from_tau(1.0);
  CHECK(infonce_t2i(basis_batch(2, 5, 3), unit).value ==
        doctest::Approx(kWorked).epsilon(1e-14));
}

TEST_CASE("symmetric similarities give equal directions") {
  Rng rng(2);
  EmbeddingBatch b = random_batch(5, 1, 1, 6, rng);
  b.visual_values = b.text_values;  // S = T T^T is symmetric
  const Temperature t = Temperature::from_tau(0.4);
  CHECK(infonce_i2t(b, t).value == doctest::Approx(infonce_t2i(b, t).value).epsilon(1e-13));
}

TEST_CASE("total contrastive loss averages the directions") {
  Rng rng(4);
  const auto b = random_batch(6, 3, 2, 5, rng);
  const Temperature t = Temperature::from_tau(0.15);
  const double a = infonce_t2i(b, t).value, c = infonce_i2t(b, t).value;
  CHECK(infonce_total(b, t).value == doctest::Approx((a + c) / 2).epsilon(1e-14));
}

TEST_CASE("perfect alignment drives the loss to zero as tau shrinks") {
  const auto b = basis_batch(4, 2, 2);
  double prev = 1e9;
  for (double tau : {1.0, 0.3, 0.1, 0.03, 0.01}) {
    const double v = infonce_t2i(b, Temperature::from_tau(tau)).value;
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-40);
}

TEST_CASE("non-normalized embeddings are rejected") {
  auto b = basis_batch(2, 1, 1);
  b.text(0, 0)[0] = 1.01;
  CHECK_THROWS_AS(infonce_t2i(b, Temperature{}), DataError);
}

TEST_CASE("ID loss oracles") {
  SUBCASE("uniform logits give ln C") {
    for (int c : {2, 10, 482}) {
      const auto b = basis_batch(3, 1, 2);
      const IdHead head(c, 3);  // zero weights: all logits equal
      const std::vector<int> labels{0, 1, c - 1};
      CHECK(std::abs(id_loss(b, labels, head).value - std::log(c)) < 1e-12);
    }
  }
  SUBCASE("binary margin z gives ln(1 + e^-z)") {
    EmbeddingBatch b(1, 1, 1, 1);
    b.text(0, 0)[0] = 1;
    b.visual(0, 0)[0] = 1;
    for (double z : {0.0, 0.5, 2.0, 7.0}) {
      IdHead head(2, 1);
      head.weights[0](0, 0) = z;
      const std::vector<int> labels{0};
      CHECK(id_loss(b, labels, head).value ==
            doctest::Approx(std::log1p(std::exp(-z))).epsilon(1e-14));
    }
  }
  SUBCASE("growing margin lowers the loss") {
    EmbeddingBatch b(1, 1, 1, 1);
    b.text(0, 0)[0] = 1;
    b.visual(0, 0)[0] = 1;
    double prev = 1e9;
    for (double z = 0; z < 40; z += 4) {
      IdHead head(5, 1);
      head.weights[0](3, 0) = z;
      const std::vector<int> labels{3};
      const double v = id_loss(b, labels, head).value;
      CHECK(v < prev);
      prev = v;
    }
  }
  SUBCASE("label outside the head") {
    const std::vector<int> labels{0, 5};
    CHECK_THROWS_AS(id_loss(basis_batch(2, 1, 1), labels, IdHead(3, 2)), DataError);
  }
}

TEST_CASE("total loss weighting") {
  Rng rng(8);
  const auto b = random_batch(4, 5, 3, 6, rng);
  IdHead head(6, 6);
  testing::fill_normal(head.weights[0].values, rng, 1.0);
  const std::vector<int> labels{0, 3, 3, 5};
  const Temperature t = Temperature::from_tau(0.09);
  const double info = infonce_total(b, t).value;
  const double id = id_loss(b, labels, head).value;
  CHECK(total_loss(b, labels, t, head, {1, 0}).total == doctest::Approx(info).epsilon(1e-14));
  CHECK(total_loss(b, labels, t, head, {0, 1}).total == doctest::Approx(id).epsilon(1e-14));
  CHECK(total_loss(b, labels, t, head, {1, 1}).total ==
        doctest::Approx(info + id).epsilon(1e-14));
  const LossBundle mix = total_loss(b, labels, t, head, {0.3, 2.5});
  CHECK(mix.total == doctest::Approx(0.3 * info + 2.5 * id).epsilon(1e-14));
  CHECK(mix.info == doctest::Approx(info).epsilon(1e-14));
}

TEST_CASE("model gradients match finite differences") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = testing::random_grad_case(rng);
    const auto params = testing::random_params(c, rng);
    const auto batch = testing::random_samples(c, rng);
    const auto r = testing::check_gradients(params, batch, c.weights);
    INFO("trial " << trial << " worst tensor " << r.worst_tensor);
    CHECK(r.worst_relative_error <= 1e-5);
  }
}

TEST_CASE("temperature gradient at the uniform point vanishes") {
  // With every similarity equal the loss is ln M for all tau.
  const auto b = uniform_batch(4, 1, 1);
  CHECK(std::abs(infonce_total(b, Temperature::from_tau(0.5)).grad_log_tau) < 1e-14);
}

TEST_CASE("contrastive loss decomposes over view pairs") {
  Rng rng(14);
  const auto b = random_batch(5, 4, 3, 7, rng);
  const Temperature t = Temperature::from_tau(0.2);
  double t2i = 0, i2t = 0;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 3; ++k) {
      EmbeddingBatch one(5, 1, 1, 7);
      for (int i = 0; i < 5; ++i) {
        std::copy(b.text(i, j).begin(), b.text(i, j).end(), one.text(i, 0).begin());
        std::copy(b.visual(i, k).begin(), b.visual(i, k).end(), one.visual(i, 0).begin());
      }
      t2i += infonce_t2i(one, t).value / 12;
      i2t += infonce_i2t(one, t).value / 12;
    }
  CHECK(infonce_t2i(b, t).value == doctest::Approx(t2i).epsilon(1e-13));
  CHECK(infonce_i2t(b, t).value == doctest::Approx(i2t).epsilon(1e-13));
}

TEST_CASE("losses ignore the order of pairs") {
  Rng rng(15);
  const auto b = random_batch(6, 2, 3, 5, rng);
  IdHead head(4, 5);
  testing::fill_normal(head.weights[0].values, rng, 1.0);
  const std::vector<int> labels{0, 1, 2, 3, 0, 1};
  const std::vector<int> perm{3, 0, 5, 1, 4, 2};
  EmbeddingBatch p(6, 2, 3, 5);
  std::vector<int> plabels;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 2; ++j)
      std::copy(b.text(perm[i], j).begin(), b.text(perm[i], j).end(), p.text(i, j).begin());
    for (int k = 0; k < 3; ++k)
      std::copy(b.visual(perm[i], k).begin(), b.visual(perm[i], k).end(), p.visual(i, k).begin());
    plabels.push_back(labels[perm[i]]);
  }
  const Temperature t = Temperature::from_tau(0.1);
  CHECK(total_loss(p, plabels, t, head, {}).total ==
        doctest::Approx(total_loss(b, labels, t, head, {}).total).epsilon(1e-13));
}

TEST_CASE("losses stay finite and non-negative at tiny temperatures") {
  Rng rng(16);
  for (double tau : {1e-2, 1e-3, 1e-4}) {
    const auto b = random_batch(8, 3, 2, 4, rng);
    const auto v = infonce_total(b, Temperature::from_tau(tau));
    CHECK(std::isfinite(v.value));
    CHECK(v.value >= 0);
    CHECK(std::isfinite(v.grad_log_tau));
  }
}
