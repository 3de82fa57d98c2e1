#include "semantic/tokens.hpp"

#include <string>

#include "common/error.hpp"

namespace agiqa::semantic {

nn::Tensor1 average_tokens(const TokenHiddenMatrix& m) {
  if (m.rows == 0 || m.cols == 0) {
    fail(ErrorCode::kEmptyInput, "average_tokens: token matrix is empty (" +
                                     std::to_string(m.rows) + "x" + std::to_string(m.cols) + ")");
  }
  if (m.values.size() != m.rows * m.cols) {
    fail(ErrorCode::kShape, "average_tokens: " + std::to_string(m.values.size()) +
                                " values for a " + std::to_string(m.rows) + "x" +
                                std::to_string(m.cols) + " matrix");
  }
  nn::Tensor1 mean(m.cols, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* row = m.values.data() + r * m.cols;
    for (std::size_t c = 0; c < m.cols; ++c) mean[c] += row[c];
  }
  const double inv = 1.0 / static_cast<double>(m.rows);
  for (double& v : mean) v *= inv;
  return mean;
}

}  // namespace agiqa::semantic
