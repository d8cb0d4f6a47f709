#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "omg/raster.hpp"

namespace omg {

// Row-major dense matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, fill) {}

  double& operator()(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const {
    return values[static_cast<std::size_t>(r) * cols + c];
  }
  std::span<double> row(int r) {
    return {values.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
  std::span<const double> row(int r) const {
    return {values.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
};

// Linear map followed by L2 normalization: y = (W x + b) / |W x + b|.
struct EncoderParams {
  Matrix weight;  // out_dim x in_dim
  std::vector<double> bias;

  EncoderParams() = default;
  EncoderParams(int out_dim, int in_dim)
      : weight(out_dim, in_dim), bias(static_cast<std::size_t>(out_dim), 0.0) {}

  int out_dim() const { return weight.rows; }
  int in_dim() const { return weight.cols; }
};

struct EncoderGrads {
  Matrix weight;
  std::vector<double> bias;
  std::vector<double> input;
};

struct EncodeResult {
  std::vector<double> y;
  double norm = 0;  // |W x + b| before normalization
};

// Grid side g for which channels * g^2 * 2 == dim; throws DataError otherwise.
int raster_grid_for(int channels, int dim);
int raster_feature_dim(int channels, int grid);

// Per-channel mean then standard deviation over a g x g grid of cells. Layout:
// all means (channel-major, cells row-major), then all standard deviations.
std::vector<double> featurize_raster(const Raster& raster, int dim);

EncodeResult encode(const EncoderParams& params, std::span<const double> x);

// Gradients of a scalar through y given dL/dy.
EncoderGrads encode_backward(const EncoderParams& params, std::span<const double> x,
                             std::span<const double> upstream);

// dL/dz for z = W x + b, given the forward result and dL/dy.
std::vector<double> normalize_backward(const EncodeResult& fwd,
                                       std::span<const double> upstream);

// weight_grad += dz x^T, bias_grad += dz; zero entries of x are skipped.
void accumulate_param_grads(std::span<const double> dz, std::span<const double> x,
                            Matrix& weight_grad, std::vector<double>& bias_grad);

}  // namespace omg
