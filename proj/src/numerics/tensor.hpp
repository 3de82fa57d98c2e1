#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "numerics/rng.hpp"

namespace agiqa::nn {

using Tensor1 = std::vector<double>;

enum class Mode { kTrain, kEval };

/// Trainable row-major matrix with a gradient buffer of identical shape.
///
/// The gradient buffer is mutable: it is accumulation scratch written by
/// Graph::backward, not part of the parameter's value. Eval-mode graphs never
/// touch it, so a frozen model can be shared between threads.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, std::size_t rows, std::size_t cols)
      : name(std::move(name)), rows(rows), cols(cols), value(rows * cols, 0.0),
        grad(rows * cols, 0.0) {}

  std::size_t size() const noexcept { return value.size(); }
  void zero_grad() const { std::fill(grad.begin(), grad.end(), 0.0); }

  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> value;
  mutable std::vector<double> grad;
};

/// Fully connected layer: y = W x + b with W stored out x in.
class AffineLayer {
 public:
  AffineLayer() = default;
  AffineLayer(const std::string& name, std::size_t in, std::size_t out);

  std::size_t in() const noexcept { return weight_.cols; }
  std::size_t out() const noexcept { return weight_.rows; }

  Parameter& weight() noexcept { return weight_; }
  Parameter& bias() noexcept { return bias_; }
  const Parameter& weight() const noexcept { return weight_; }
  const Parameter& bias() const noexcept { return bias_; }

  /// Uniform in +-sqrt(6 / (in + out)), zero bias.
  void init_uniform(Rng& rng);
  void init_zero();
  /// W = I on the leading min(in, out) diagonal, zero bias.
  void init_identity();

 private:
  Parameter weight_;
  Parameter bias_;
};

// Pure kernels on plain vectors. The graph ops in graph.hpp use the same
// arithmetic and add the backward bookkeeping.
Tensor1 affine_forward(const AffineLayer& layer, std::span<const double> x);
Tensor1 relu_forward(std::span<const double> x);
Tensor1 sigmoid_forward(std::span<const double> x);
Tensor1 dropout_forward(std::span<const double> x, double rate, Mode mode, Rng& rng);
double mse_loss(std::span<const double> pred, std::span<const double> target);
/// d(mse)/d(pred) = (2/n)(pred - target).
Tensor1 mse_grad(std::span<const double> pred, std::span<const double> target);

double sigmoid(double x) noexcept;

void check_dropout_rate(double rate);

}  // namespace agiqa::nn
