#include "numerics/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/error.hpp"

namespace agiqa::nn {

AffineLayer::AffineLayer(const std::string& name, std::size_t in, std::size_t out)
    : weight_(name + ".weight", out, in), bias_(name + ".bias", out, 1) {
  if (in == 0 || out == 0) {
    fail(ErrorCode::kShape, "affine layer '" + name + "' needs positive dims, got in=" +
                                std::to_string(in) + " out=" + std::to_string(out));
  }
}

void AffineLayer::init_uniform(Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(in() + out()));
  for (double& w : weight_.value) w = rng.uniform(-bound, bound);
  std::fill(bias_.value.begin(), bias_.value.end(), 0.0);
}

void AffineLayer::init_zero() {
  std::fill(weight_.value.begin(), weight_.value.end(), 0.0);
  std::fill(bias_.value.begin(), bias_.value.end(), 0.0);
}

void AffineLayer::init_identity() {
  init_zero();
  for (std::size_t i = 0; i < std::min(in(), out()); ++i) weight_.value[i * in() + i] = 1.0;
}

Tensor1 affine_forward(const AffineLayer& layer, std::span<const double> x) {
  if (x.size() != layer.in()) {
    fail(ErrorCode::kShape, "affine '" + layer.weight().name + "': input has " +
                                std::to_string(x.size()) + " entries, layer expects " +
                                std::to_string(layer.in()));
  }
  const auto& w = layer.weight().value;
  const auto& b = layer.bias().value;
  Tensor1 y(layer.out());
  for (std::size_t j = 0; j < layer.out(); ++j) {
    const double* row = w.data() + j * layer.in();
    double acc = b[j];
    for (std::size_t i = 0; i < layer.in(); ++i) acc += row[i] * x[i];
    y[j] = acc;
  }
  return y;
}

Tensor1 relu_forward(std::span<const double> x) {
  Tensor1 y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [](double v) { return v > 0.0 ? v : 0.0; });
  return y;
}

double sigmoid(double x) noexcept {
  // Clamped so the result is strictly inside (0, 1) even where exp saturates.
  constexpr double kLo = std::numeric_limits<double>::min();
  constexpr double kHi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  double y;
  if (x >= 0.0) {
    y = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    y = e / (1.0 + e);
  }
  return std::clamp(y, kLo, kHi);
}

Tensor1 sigmoid_forward(std::span<const double> x) {
  Tensor1 y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [](double v) { return sigmoid(v); });
  return y;
}

void check_dropout_rate(double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    fail(ErrorCode::kConfig, "dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
}

Tensor1 dropout_forward(std::span<const double> x, double rate, Mode mode, Rng& rng) {
  check_dropout_rate(rate);
  Tensor1 y(x.begin(), x.end());
  if (mode == Mode::kEval || rate == 0.0) return y;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& v : y) v = rng.uniform() < rate ? 0.0 : v * keep_scale;
  return y;
}

namespace {
void check_pair(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty()) {
    fail(ErrorCode::kShape, "mse: prediction has " + std::to_string(pred.size()) +
                                " entries, target has " + std::to_string(target.size()));
  }
}
}  // namespace

double mse_loss(std::span<const double> pred, std::span<const double> target) {
  check_pair(pred, target);
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

Tensor1 mse_grad(std::span<const double> pred, std::span<const double> target) {
  check_pair(pred, target);
  Tensor1 g(pred.size());
  const double scale = 2.0 / static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) g[i] = scale * (pred[i] - target[i]);
  return g;
}

}  // namespace agiqa::nn
