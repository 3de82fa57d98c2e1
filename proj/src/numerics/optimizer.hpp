#pragma once

#include <cstdint>
#include <vector>

#include "numerics/tensor.hpp"

namespace agiqa::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam over a fixed list of parameters.
class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamConfig config);

  /// Applies one update from the accumulated gradients. A non-finite gradient
  /// aborts before any parameter is modified, naming the offending parameter.
  void step();
  void zero_grad() const;

  std::uint64_t steps() const noexcept { return step_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  std::vector<Parameter*> params_;
  AdamConfig config_;
  std::vector<std::vector<double>> first_moment_;
  std::vector<std::vector<double>> second_moment_;
  std::uint64_t step_ = 0;
};

}  // namespace agiqa::nn
