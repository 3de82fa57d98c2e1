#include "numerics/graph.hpp"

#include <cmath>
#include <string>

#include "common/error.hpp"

namespace agiqa::nn {

namespace {

std::string dims(const Graph& g, Var v) {
  return std::to_string(g.rows(v)) + "x" + std::to_string(g.cols(v));
}

void require_same_shape(const Graph& g, Var a, Var b, const char* op) {
  if (g.rows(a) != g.rows(b) || g.cols(a) != g.cols(b)) {
    fail(ErrorCode::kShape, std::string(op) + ": operand shapes " + dims(g, a) + " and " +
                                dims(g, b) + " differ");
  }
}

}  // namespace

Var Graph::input(std::vector<double> data, std::size_t rows, std::size_t cols) {
  if (data.size() != rows * cols) {
    fail(ErrorCode::kShape, "input: " + std::to_string(data.size()) + " values for shape " +
                                std::to_string(rows) + "x" + std::to_string(cols));
  }
  Node n;
  n.value = std::move(data);
  n.rows = rows;
  n.cols = cols;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Graph::parameter(const Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{it->second};
  Node n;
  n.value = p.value;
  n.rows = p.rows;
  n.cols = p.cols;
  n.param = &p;
  n.needs_grad = grad_enabled_;
  nodes_.push_back(std::move(n));
  const auto id = static_cast<std::uint32_t>(nodes_.size() - 1);
  param_nodes_.emplace(&p, id);
  return Var{id};
}

Var Graph::push(std::vector<double> value, std::size_t rows, std::size_t cols,
                std::span<const Var> inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  n.rows = rows;
  n.cols = cols;
  if (grad_enabled_) {
    for (Var in : inputs) n.needs_grad = n.needs_grad || nodes_[in.id].needs_grad;
    if (n.needs_grad) n.backward = std::move(backward);
  }
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

double Graph::scalar(Var v) const {
  if (numel(v) != 1) fail(ErrorCode::kShape, "scalar(): node has shape " + dims(*this, v));
  return nodes_[v.id].value[0];
}

void Graph::backward(Var loss) {
  if (nodes_.empty() || loss.id >= nodes_.size()) {
    fail(ErrorCode::kState, "backward() called before a forward pass was recorded");
  }
  if (!grad_enabled_) fail(ErrorCode::kState, "backward() on a graph built without gradients");
  if (numel(loss) != 1) fail(ErrorCode::kShape, "backward() needs a 1x1 loss, got " + dims(*this, loss));

  for (auto& n : nodes_) {
    if (n.needs_grad) {
      n.grad.assign(n.value.size(), 0.0);
    } else {
      n.grad.clear();
    }
  }
  if (!nodes_[loss.id].needs_grad) return;  // nothing trainable upstream
  nodes_[loss.id].grad[0] = 1.0;

  for (std::uint32_t id = loss.id + 1; id-- > 0;) {
    if (nodes_[id].backward) nodes_[id].backward(*this, Var{id});
  }
  for (const auto& n : nodes_) {
    if (n.param == nullptr || !n.needs_grad) continue;
    auto& dst = n.param->grad;
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += n.grad[i];
  }
}

Var affine(Graph& g, const AffineLayer& layer, Var x) {
  const std::size_t in = layer.in();
  const std::size_t out = layer.out();
  // A 1 x n vector is accepted as a single row; any rows x in matrix works.
  if (g.cols(x) != in) {
    fail(ErrorCode::kShape, "affine '" + layer.weight().name + "': input is " + dims(g, x) +
                                ", layer expects " + std::to_string(in) + " columns");
  }
  const Var w = g.parameter(layer.weight());
  const Var b = g.parameter(layer.bias());
  const std::size_t rows = g.rows(x);
  const auto& xv = g.value(x);
  const auto& wv = g.value(w);
  const auto& bv = g.value(b);
  std::vector<double> y(rows * out);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = xv.data() + r * in;
    for (std::size_t j = 0; j < out; ++j) {
      const double* wr = wv.data() + j * in;
      double acc = bv[j];
      for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xr[i];
      y[r * out + j] = acc;
    }
  }
  return g.push(std::move(y), rows, out, {x, w, b}, [x, w, b, rows, in, out](Graph& g, Var self) {
    const auto& gy = g.grad(self);
    const auto& xv = g.value(x);
    const auto& wv = g.value(w);
    if (g.needs_grad(w)) {
      auto& gw = g.grad(w);
      auto& gb = g.grad(b);
      for (std::size_t r = 0; r < rows; ++r) {
        const double* xr = xv.data() + r * in;
        for (std::size_t j = 0; j < out; ++j) {
          const double gyj = gy[r * out + j];
          if (gyj == 0.0) continue;
          double* gwr = gw.data() + j * in;
          for (std::size_t i = 0; i < in; ++i) gwr[i] += gyj * xr[i];
          gb[j] += gyj;
        }
      }
    }
    if (g.needs_grad(x)) {
      auto& gx = g.grad(x);
      for (std::size_t r = 0; r < rows; ++r) {
        double* gxr = gx.data() + r * in;
        for (std::size_t j = 0; j < out; ++j) {
          const double gyj = gy[r * out + j];
          if (gyj == 0.0) continue;
          const double* wr = wv.data() + j * in;
          for (std::size_t i = 0; i < in; ++i) gxr[i] += gyj * wr[i];
        }
      }
    }
  });
}

Var relu(Graph& g, Var x) {
  auto y = relu_forward(g.value(x));
  return g.push(std::move(y), g.rows(x), g.cols(x), {x}, [x](Graph& g, Var self) {
    const auto& gy = g.grad(self);
    const auto& xv = g.value(x);
    auto& gx = g.grad(x);
    for (std::size_t i = 0; i < gy.size(); ++i) {
      if (xv[i] > 0.0) gx[i] += gy[i];
    }
  });
}

Var sigmoid(Graph& g, Var x) {
  auto y = sigmoid_forward(g.value(x));
  return g.push(std::move(y), g.rows(x), g.cols(x), {x}, [x](Graph& g, Var self) {
    const auto& gy = g.grad(self);
    const auto& yv = g.value(self);
    auto& gx = g.grad(x);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * yv[i] * (1.0 - yv[i]);
  });
}

Var dropout(Graph& g, Var x, double rate, Mode mode, Rng& rng) {
  check_dropout_rate(rate);
  if (mode == Mode::kEval || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(g.numel(x));
  for (double& m : mask) m = rng.uniform() < rate ? 0.0 : keep_scale;
  std::vector<double> y(mask.size());
  const auto& xv = g.value(x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = xv[i] * mask[i];
  return g.push(std::move(y), g.rows(x), g.cols(x), {x},
                [x, mask = std::move(mask)](Graph& g, Var self) {
                  const auto& gy = g.grad(self);
                  auto& gx = g.grad(x);
                  for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * mask[i];
                });
}

Var add(Graph& g, Var a, Var b) {
  require_same_shape(g, a, b, "add");
  std::vector<double> y(g.value(a));
  const auto& bv = g.value(b);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
  return g.push(std::move(y), g.rows(a), g.cols(a), {a, b}, [a, b](Graph& g, Var self) {
    const auto& gy = g.grad(self);
    for (Var in : {a, b}) {
      if (!g.needs_grad(in)) continue;
      auto& gi = g.grad(in);
      for (std::size_t i = 0; i < gy.size(); ++i) gi[i] += gy[i];
    }
  });
}

Var mul(Graph& g, Var a, Var b) {
  require_same_shape(g, a, b, "mul");
  std::vector<double> y(g.value(a));
  const auto& bv = g.value(b);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
  return g.push(std::move(y), g.rows(a), g.cols(a), {a, b}, [a, b](Graph& g, Var self) {
    const auto& gy = g.grad(self);
    const auto& av = g.value(a);
    const auto& bv = g.value(b);
    if (g.needs_grad(a)) {
      auto& ga = g.grad(a);
      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * bv[i];
    }
    if (g.needs_grad(b)) {
      auto& gb = g.grad(b);
      for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i] * av[i];
    }
  });
}

Var scale(Graph& g, Var a, double c) {
  std::vector<double> y(g.value(a));
  for (double& v : y) v *= c;
  return g.push(std::move(y), g.rows(a), g.cols(a), {a}, [a, c](Graph& g, Var self) {
    const auto& gy = g.grad(self);
    auto& ga = g.grad(a);
    for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += c * gy[i];
  });
}

Var matmul(Graph& g, Var a, Var b) {
  const std::size_t m = g.rows(a), k = g.cols(a), n = g.cols(b);
  if (g.rows(b) != k) {
    fail(ErrorCode::kShape, "matmul: " + dims(g, a) + " times " + dims(g, b));
  }
  const auto& av = g.value(a);
  const auto& bv = g.value(b);
  std::vector<double> y(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < k; ++t) {
      const double ait = av[i * k + t];
      for (std::size_t j = 0; j < n; ++j) y[i * n + j] += ait * bv[t * n + j];
    }
  }
  return g.push(std::move(y), m, n, {a, b}, [a, b, m, k, n](Graph& g, Var self) {
    const auto& gy = g.grad(self);
    const auto& av = g.value(a);
    const auto& bv = g.value(b);
    if (g.needs_grad(a)) {
      auto& ga = g.grad(a);  // gy * b^T
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t = 0; t < k; ++t) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += gy[i * n + j] * bv[t * n + j];
          ga[i * k + t] += acc;
        }
    }
    if (g.needs_grad(b)) {
      auto& gb = g.grad(b);  // a^T * gy
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t = 0; t < k; ++t) {
          const double ait = av[i * k + t];
          for (std::size_t j = 0; j < n; ++j) gb[t * n + j] += ait * gy[i * n + j];
        }
    }
  });
}

Var matmul_nt(Graph& g, Var a, Var b) {
  const std::size_t m = g.rows(a), k = g.cols(a), n = g.rows(b);
  if (g.cols(b) != k) {
    fail(ErrorCode::kShape, "matmul_nt: " + dims(g, a) + " times transpose of " + dims(g, b));
  }
  const auto& av = g.value(a);
  const auto& bv = g.value(b);
  std::vector<double> y(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += av[i * k + t] * bv[j * k + t];
      y[i * n + j] = acc;
    }
  return g.push(std::move(y), m, n, {a, b}, [a, b, m, k, n](Graph& g, Var self) {
    const auto& gy = g.grad(self);
    const auto& av = g.value(a);
    const auto& bv = g.value(b);
    if (g.needs_grad(a)) {
      auto& ga = g.grad(a);  // gy * b
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double gij = gy[i * n + j];
          for (std::size_t t = 0; t < k; ++t) ga[i * k + t] += gij * bv[j * k + t];
        }
    }
    if (g.needs_grad(b)) {
      auto& gb = g.grad(b);  // gy^T * a
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double gij = gy[i * n + j];
          for (std::size_t t = 0; t < k; ++t) gb[j * k + t] += gij * av[i * k + t];
        }
    }
  });
}

Var softmax_rows(Graph& g, Var x) {
  const std::size_t rows = g.rows(x), cols = g.cols(x);
  std::vector<double> y(g.value(x));
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = y.data() + r * cols;
    double mx = row[0];
    for (std::size_t c = 1; c < cols; ++c) mx = std::max(mx, row[c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      row[c] = std::exp(row[c] - mx);
      sum += row[c];
    }
    for (std::size_t c = 0; c < cols; ++c) row[c] /= sum;
  }
  return g.push(std::move(y), rows, cols, {x}, [x, rows, cols](Graph& g, Var self) {
    const auto& gy = g.grad(self);
    const auto& yv = g.value(self);
    auto& gx = g.grad(x);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t o = r * cols;
      double dot = 0.0;
      for (std::size_t c = 0; c < cols; ++c) dot += gy[o + c] * yv[o + c];
      for (std::size_t c = 0; c < cols; ++c) gx[o + c] += yv[o + c] * (gy[o + c] - dot);
    }
  });
}

Var reshape(Graph& g, Var x, std::size_t rows, std::size_t cols) {
  if (rows * cols != g.numel(x)) {
    fail(ErrorCode::kShape, "reshape: " + dims(g, x) + " to " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
  return g.push(g.value(x), rows, cols, {x}, [x](Graph& g, Var self) {
    const auto& gy = g.grad(self);
    auto& gx = g.grad(x);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
  });
}

Var concat(Graph& g, std::span<const Var> parts) {
  std::vector<double> y;
  std::vector<Var> ins(parts.begin(), parts.end());
  for (Var p : ins) y.insert(y.end(), g.value(p).begin(), g.value(p).end());
  const std::size_t n = y.size();
  return g.push(std::move(y), 1, n, ins, [ins](Graph& g, Var self) {
    const auto& gy = g.grad(self);
    std::size_t offset = 0;
    for (Var p : ins) {
      const std::size_t len = g.numel(p);
      if (g.needs_grad(p)) {
        auto& gp = g.grad(p);
        for (std::size_t i = 0; i < len; ++i) gp[i] += gy[offset + i];
      }
      offset += len;
    }
  });
}

Var weighted_sum(Graph& g, std::span<const Var> parts, Var weights) {
  if (parts.empty() || g.numel(weights) != parts.size()) {
    fail(ErrorCode::kShape, "weighted_sum: " + std::to_string(parts.size()) +
                                " parts but weights has " + std::to_string(g.numel(weights)) +
                                " entries");
  }
  for (Var p : parts) require_same_shape(g, parts[0], p, "weighted_sum");
  std::vector<Var> ins(parts.begin(), parts.end());
  const auto& av = g.value(weights);
  std::vector<double> y(g.numel(ins[0]), 0.0);
  for (std::size_t k = 0; k < ins.size(); ++k) {
    const auto& pv = g.value(ins[k]);
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += av[k] * pv[j];
  }
  std::vector<Var> all = ins;
  all.push_back(weights);
  return g.push(std::move(y), g.rows(ins[0]), g.cols(ins[0]), all,
                [ins, weights](Graph& g, Var self) {
                  const auto& gy = g.grad(self);
                  const auto& av = g.value(weights);
                  for (std::size_t k = 0; k < ins.size(); ++k) {
                    const auto& pv = g.value(ins[k]);
                    if (g.needs_grad(ins[k])) {
                      auto& gp = g.grad(ins[k]);
                      for (std::size_t j = 0; j < gy.size(); ++j) gp[j] += av[k] * gy[j];
                    }
                    if (g.needs_grad(weights)) {
                      double acc = 0.0;
                      for (std::size_t j = 0; j < gy.size(); ++j) acc += gy[j] * pv[j];
                      g.grad(weights)[k] += acc;
                    }
                  }
                });
}

Var mse_loss(Graph& g, Var pred, std::span<const double> target) {
  if (g.numel(pred) != target.size() || target.empty()) {
    fail(ErrorCode::kShape, "mse: prediction has " + std::to_string(g.numel(pred)) +
                                " entries, target has " + std::to_string(target.size()));
  }
  const double loss = nn::mse_loss(g.value(pred), target);
  std::vector<double> t(target.begin(), target.end());
  return g.push({loss}, 1, 1, {pred}, [pred, t = std::move(t)](Graph& g, Var self) {
    const double gy = g.grad(self)[0];
    const auto& pv = g.value(pred);
    auto& gp = g.grad(pred);
    const double s = 2.0 / static_cast<double>(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) gp[i] += gy * s * (pv[i] - t[i]);
  });
}

}  // namespace agiqa::nn
