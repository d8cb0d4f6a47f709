#include "omg/encoder.hpp"

#include <cmath>
#include <string>

#include "omg/types.hpp"

namespace omg {

int raster_feature_dim(int channels, int grid) { return channels * grid * grid * 2; }

int raster_grid_for(int channels, int dim) {
  for (int g = 1; raster_feature_dim(channels, g) <= dim; ++g)
    if (raster_feature_dim(channels, g) == dim) return g;
  throw DataError("feature dimension " + std::to_string(dim) +
                  " is not channels * g^2 * 2 for " + std::to_string(channels) +
                  " channels");
}

std::vector<double> featurize_raster(const Raster& raster, int dim) {
  if (raster.empty()) throw DataError("cannot featurize an empty raster");
  const int g = raster_grid_for(raster.channels(), dim);
  const int cells = g * g;
  std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
  const std::size_t std_offset = static_cast<std::size_t>(raster.channels()) * cells;
  const int H = raster.height();
  const int W = raster.width();
  for (int c = 0; c < raster.channels(); ++c) {
    for (int gy = 0; gy < g; ++gy) {
      const int y0 = std::min(gy * H / g, H - 1);
      const int y1 = std::max(y0 + 1, (gy + 1) * H / g);
      for (int gx = 0; gx < g; ++gx) {
        const int x0 = std::min(gx * W / g, W - 1);
        const int x1 = std::max(x0 + 1, (gx + 1) * W / g);
        double sum = 0;
        double sum2 = 0;
        for (int y = y0; y < y1; ++y)
          for (int x = x0; x < x1; ++x) {
            const double v = raster.at(c, y, x);
            sum += v;
            sum2 += v * v;
          }
        const double n = static_cast<double>((y1 - y0) * (x1 - x0));
        const double mean = sum / n;
        const double var = std::max(0.0, sum2 / n - mean * mean);
        const std::size_t cell = static_cast<std::size_t>(c) * cells + gy * g + gx;
        out[cell] = mean;
        out[std_offset + cell] = std::sqrt(var);
      }
    }
  }
  return out;
}

namespace {

// Positions of the nonzero entries of x; hashed text features are sparse.
std::vector<std::size_t> nonzeros(std::span<const double> x) {
  std::vector<std::size_t> nz;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] != 0) nz.push_back(j);
  return nz;
}

}  // namespace

EncodeResult encode(const EncoderParams& params, std::span<const double> x) {
  if (static_cast<int>(x.size()) != params.in_dim())
    throw DataError("encoder input has dimension " + std::to_string(x.size()) +
                    ", expected " + std::to_string(params.in_dim()));
  EncodeResult r;
  r.y = params.bias;
  const auto nz = nonzeros(x);
  for (int i = 0; i < params.out_dim(); ++i) {
    const auto w = params.weight.row(i);
    double acc = 0;
    for (std::size_t j : nz) acc += w[j] * x[j];
    r.y[static_cast<std::size_t>(i)] += acc;
  }
  double n2 = 0;
  for (double v : r.y) n2 += v * v;
  r.norm = std::sqrt(n2);
  if (!(r.norm > 0) || !std::isfinite(r.norm)) throw NumericError("degenerate embedding");
  for (double& v : r.y) v /= r.norm;
  return r;
}

std::vector<double> normalize_backward(const EncodeResult& fwd,
                                       std::span<const double> upstream) {
  double gy = 0;
  for (std::size_t i = 0; i < fwd.y.size(); ++i) gy += upstream[i] * fwd.y[i];
  std::vector<double> dz(fwd.y.size());
  for (std::size_t i = 0; i < dz.size(); ++i)
    dz[i] = (upstream[i] - gy * fwd.y[i]) / fwd.norm;
  return dz;
}

void accumulate_param_grads(std::span<const double> dz, std::span<const double> x,
                            Matrix& weight_grad, std::vector<double>& bias_grad) {
  const auto nz = nonzeros(x);
  for (std::size_t i = 0; i < dz.size(); ++i) {
    bias_grad[i] += dz[i];
    auto row = weight_grad.row(static_cast<int>(i));
    for (std::size_t j : nz) row[j] += dz[i] * x[j];
  }
}

EncoderGrads encode_backward(const EncoderParams& params, std::span<const double> x,
                             std::span<const double> upstream) {
  if (static_cast<int>(upstream.size()) != params.out_dim())
    throw DataError("upstream gradient has the wrong dimension");
  const EncodeResult fwd = encode(params, x);
  const auto dz = normalize_backward(fwd, upstream);
  EncoderGrads g{Matrix(params.out_dim(), params.in_dim()),
                 std::vector<double>(static_cast<std::size_t>(params.out_dim()), 0.0),
                 std::vector<double>(x.size(), 0.0)};
  accumulate_param_grads(dz, x, g.weight, g.bias);
  for (int i = 0; i < params.out_dim(); ++i) {
    const auto w = params.weight.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) g.input[j] += w[j] * dz[static_cast<std::size_t>(i)];
  }
  return g;
}

}  // namespace omg
