#pragma once

#include <cstddef>
#include <vector>

#include "numerics/tensor.hpp"

namespace agiqa::semantic {

/// Last-layer hidden states of one model answer: rows are tokens.
struct TokenHiddenMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major, rows * cols

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Column mean over the token dimension.
nn::Tensor1 average_tokens(const TokenHiddenMatrix& m);

}  // namespace agiqa::semantic
