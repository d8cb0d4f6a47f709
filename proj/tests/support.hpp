#pragma once

// Helpers shared by the unit tests and the acceptance runner: random model
// construction, a finite-difference gradient checker and brute-force oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "omg/geometry.hpp"
#include "omg/model.hpp"
#include "omg/random.hpp"

namespace omg::testing {

struct GradCase {
  int pairs = 4;
  int dim = 8;
  int text_granularities = 5;
  int visual_granularities = 3;
  int classes = 4;
  bool shared_head = true;
  double tau = 0.07;
  LossWeights weights;
  int text_in = 10;
  std::vector<int> visual_in{6, 7, 8};
};

inline GradCase random_grad_case(Rng& rng) {
  GradCase c;
  c.pairs = 1 + static_cast<int>(rng.below(8));
  c.dim = 2 + static_cast<int>(rng.below(15));
  c.text_granularities = 1 + static_cast<int>(rng.below(5));
  c.visual_granularities = 1 + static_cast<int>(rng.below(3));
  c.classes = 2 + static_cast<int>(rng.below(5));
  c.shared_head = rng.below(2) == 0;
  c.tau = 0.05 + 0.95 * rng.uniform();
  // Occasionally switch a term off so both reductions are covered.
  const uint64_t mode = rng.below(6);
  c.weights.lambda1 = mode == 0 ? 0.0 : 0.25 + rng.uniform();
  c.weights.lambda2 = mode == 1 ? 0.0 : 0.25 + rng.uniform();
  c.text_in = 3 + static_cast<int>(rng.below(10));
  c.visual_in.clear();
  for (int k = 0; k < c.visual_granularities; ++k)
    c.visual_in.push_back(3 + static_cast<int>(rng.below(8)));
  return c;
}

inline void fill_normal(std::vector<double>& v, Rng& rng, double scale) {
  for (double& x : v) x = scale * rng.normal();
}

inline ModelParams random_params(const GradCase& c, Rng& rng) {
  ModelParams p;
  p.text = EncoderParams(c.dim, c.text_in);
  fill_normal(p.text.weight.values, rng, 1.0 / std::sqrt(c.text_in));
  fill_normal(p.text.bias, rng, 0.1);
  for (int k = 0; k < c.visual_granularities; ++k) {
    EncoderParams e(c.dim, c.visual_in[static_cast<std::size_t>(k)]);
    fill_normal(e.weight.values, rng, 1.0 / std::sqrt(e.in_dim()));
    fill_normal(e.bias, rng, 0.1);
    p.visual.push_back(std::move(e));
  }
  p.head = IdHead(c.classes, c.dim, c.shared_head ? 1 : c.visual_granularities);
  for (auto& m : p.head.weights) fill_normal(m.values, rng, 0.5);
  p.temperature = Temperature::from_tau(c.tau);
  return p;
}

inline std::vector<RawSample> random_samples(const GradCase& c, Rng& rng) {
  std::vector<RawSample> out(static_cast<std::size_t>(c.pairs));
  for (auto& s : out) {
    for (int j = 0; j < c.text_granularities; ++j) {
      std::vector<double> x(static_cast<std::size_t>(c.text_in));
      fill_normal(x, rng, 1.0);
      s.text.push_back(std::move(x));
    }
    for (int k = 0; k < c.visual_granularities; ++k) {
      std::vector<double> x(static_cast<std::size_t>(c.visual_in[static_cast<std::size_t>(k)]));
      fill_normal(x, rng, 1.0);
      s.visual.push_back(std::move(x));
    }
    s.label = static_cast<int>(rng.below(static_cast<uint64_t>(c.classes)));
  }
  return out;
}

// Parameter tensors in for_each_parameter order, as (name, size) runs.
inline std::vector<std::pair<std::string, std::size_t>> parameter_layout(const ModelParams& p) {
  std::vector<std::pair<std::string, std::size_t>> out;
  out.emplace_back("text.weight", p.text.weight.values.size());
  out.emplace_back("text.bias", p.text.bias.size());
  for (std::size_t k = 0; k < p.visual.size(); ++k) {
    out.emplace_back("visual" + std::to_string(k) + ".weight", p.visual[k].weight.values.size());
    out.emplace_back("visual" + std::to_string(k) + ".bias", p.visual[k].bias.size());
  }
  for (std::size_t h = 0; h < p.head.weights.size(); ++h)
    out.emplace_back("head" + std::to_string(h), p.head.weights[h].values.size());
  out.emplace_back("log_tau", 1);
  return out;
}

inline std::vector<double> flatten(ModelParams p) {
  std::vector<double> out;
  for_each_parameter(p, [&](double& v) { out.push_back(v); });
  return out;
}

struct GradCheck {
  double worst_relative_error = 0;
  std::string worst_tensor;
};

// Central differences on every scalar parameter. Errors are measured per
// parameter tensor as max|analytic - numeric| / max(|analytic|inf, |numeric|inf)
// with the denominator floored at `floor` so all-zero tensors compare absolutely.
inline GradCheck check_gradients(const ModelParams& params, const std::vector<RawSample>& batch,
                                 LossWeights weights, double step = 1e-5, double floor = 1e-6) {
  const StepResult analytic = loss_and_gradients(params, batch, weights);
  const std::vector<double> ga = flatten(analytic.grads);

  std::vector<double> gn(ga.size());
  ModelParams probe = params;
  std::vector<double*> slots;
  for_each_parameter(probe, [&](double& v) { slots.push_back(&v); });
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const double saved = *slots[i];
    *slots[i] = saved + step;
    const double up = loss_and_gradients(probe, batch, weights).loss.total;
    *slots[i] = saved - step;
    const double down = loss_and_gradients(probe, batch, weights).loss.total;
    *slots[i] = saved;
    gn[i] = (up - down) / (2 * step);
  }

  GradCheck out;
  std::size_t offset = 0;
  for (const auto& [name, size] : parameter_layout(params)) {
    double diff = 0, scale = floor;
    for (std::size_t i = offset; i < offset + size; ++i) {
      diff = std::max(diff, std::abs(ga[i] - gn[i]));
      scale = std::max({scale, std::abs(ga[i]), std::abs(gn[i])});
    }
    const double rel = diff / scale;
    if (rel > out.worst_relative_error) {
      out.worst_relative_error = rel;
      out.worst_tensor = name;
    }
    offset += size;
  }
  return out;
}

// Reciprocal-rank and hit counting by scanning every gallery score.
inline int brute_force_rank(const std::vector<double>& scores, int truth) {
  int rank = 1;
  for (int g = 0; g < static_cast<int>(scores.size()); ++g) {
    if (g == truth) continue;
    const double s = scores[static_cast<std::size_t>(g)];
    const double t = scores[static_cast<std::size_t>(truth)];
    if (s > t || (s == t && g < truth)) ++rank;
  }
  return rank;
}

// Squared distance from (px, py) to segment a-b, in plain floating point.
inline double segment_distance_sq(double px, double py, double ax, double ay, double bx,
                                  double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double qx = ax + t * dx - px, qy = ay + t * dy - py;
  return qx * qx + qy * qy;
}

// Reference trajectory mask over the kept boxes.
inline std::vector<uint8_t> brute_force_mask(const std::vector<BoundingBox>& boxes, FrameSize c,
                                             double thickness) {
  std::vector<uint8_t> mask(static_cast<std::size_t>(c.width) * c.height, 0);
  const double r2 = (thickness / 2) * (thickness / 2);
  for (int y = 0; y < c.height; ++y)
    for (int x = 0; x < c.width; ++x) {
      bool hit = false;
      for (std::size_t i = 0; i < boxes.size() && !hit; ++i) {
        const BoundingBox& a = boxes[i];
        const BoundingBox& b = boxes[i + 1 < boxes.size() ? i + 1 : i];
        hit = segment_distance_sq(x, y, a.center_x(), a.center_y(), b.center_x(), b.center_y()) <=
              r2 + 1e-9;
      }
      mask[static_cast<std::size_t>(y) * c.width + x] = hit ? 1 : 0;
    }
  return mask;
}

// Fresh empty directory under the system temp area.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("omg_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace omg::testing
