#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "numerics/tensor.hpp"

namespace agiqa::nn {

/// Handle to a value recorded on a Graph.
struct Var {
  std::uint32_t id = 0;
};

/// Reverse-mode tape over row-major matrices (vectors are 1 x n).
///
/// Nodes are appended in evaluation order, so reverse insertion order is a
/// valid topological order for backward. A graph built with grad disabled is
/// a plain forward evaluator and never writes to Parameter::grad.
///
/// backward() adds into Parameter::grad; calling it twice accumulates twice.
/// Reset with Parameter::zero_grad (or Optimizer::zero_grad) between steps.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, Var self)>;

  explicit Graph(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  Var input(std::vector<double> data, std::size_t rows, std::size_t cols);
  Var input(std::vector<double> data) {
    const auto n = data.size();
    return input(std::move(data), 1, n);
  }
  // One leaf per Parameter; repeated references share the node.
  Var parameter(const Parameter& p);

  Var push(std::vector<double> value, std::size_t rows, std::size_t cols,
           std::span<const Var> inputs, BackwardFn backward);
  Var push(std::vector<double> value, std::size_t rows, std::size_t cols,
           std::initializer_list<Var> inputs, BackwardFn backward) {
    return push(std::move(value), rows, cols, std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(backward));
  }

  const std::vector<double>& value(Var v) const { return nodes_[v.id].value; }
  std::size_t rows(Var v) const { return nodes_[v.id].rows; }
  std::size_t cols(Var v) const { return nodes_[v.id].cols; }
  std::size_t numel(Var v) const { return nodes_[v.id].value.size(); }
  double scalar(Var v) const;

  bool grad_enabled() const noexcept { return grad_enabled_; }
  bool needs_grad(Var v) const { return nodes_[v.id].needs_grad; }
  std::vector<double>& grad(Var v) { return nodes_[v.id].grad; }
  const std::vector<double>& grad(Var v) const { return nodes_[v.id].grad; }

  /// Propagates d(loss)/d(node) for a 1x1 loss and adds the parameter
  /// gradients into their Parameter::grad buffers.
  void backward(Var loss);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    std::vector<double> value;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> grad;
    BackwardFn backward;
    const Parameter* param = nullptr;
    bool needs_grad = false;
  };

  bool grad_enabled_;
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::uint32_t> param_nodes_;
};

// Graph ops. Shapes are checked and mismatches raise ErrorCode::kShape with
// both dimensions in the message.

/// Row-wise y = x W^T + b for x of shape rows x in.
Var affine(Graph& g, const AffineLayer& layer, Var x);
Var relu(Graph& g, Var x);
Var sigmoid(Graph& g, Var x);
/// Inverted dropout; eval mode (or rate 0) returns x itself.
Var dropout(Graph& g, Var x, double rate, Mode mode, Rng& rng);
Var add(Graph& g, Var a, Var b);
Var mul(Graph& g, Var a, Var b);
Var scale(Graph& g, Var a, double c);
/// a (m x k) times b (k x n).
Var matmul(Graph& g, Var a, Var b);
/// a (m x k) times b^T for b (n x k).
Var matmul_nt(Graph& g, Var a, Var b);
Var softmax_rows(Graph& g, Var x);
Var reshape(Graph& g, Var x, std::size_t rows, std::size_t cols);
/// Flattens and joins the inputs into a single 1 x total vector.
Var concat(Graph& g, std::span<const Var> parts);
/// sum_i weights[i] * parts[i] for equally shaped parts and a length-k weight vector.
Var weighted_sum(Graph& g, std::span<const Var> parts, Var weights);
/// Mean squared error against a constant target, as a 1x1 node.
Var mse_loss(Graph& g, Var pred, std::span<const double> target);

}  // namespace agiqa::nn
