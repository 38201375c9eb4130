// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/autodiff.hpp>

#include <synclift/error.hpp>

#include <unordered_map>
#include <unordered_set>

namespace synclift::nn {
namespace {

thread_local bool g_grad_enabled = true;

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

std::vector<Node*> topological_order(Node* root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  // Iterative post-order DFS; the graphs can be deep enough to matter.
  std::vector<std::pair<Node*, std::size_t>> stack{{root, 0}};
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].node();
      if (child && child->requires_grad && visited.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

std::unordered_map<Node*, Tensor> run_backward(const Tensor& output, bool create_graph) {
  if (!output.defined() || !output.requires_grad()) {
    throw UsageError("backward: tensor has no recorded graph (run a forward pass with grad enabled first)");
  }
  if (output.rows() != 1 || output.cols() != 1) throw UsageError("backward: output must be a 1x1 scalar");

  bool previous = g_grad_enabled;
  g_grad_enabled = create_graph;

  std::unordered_map<Node*, Tensor> grads;
  grads[output.node()] = Tensor::constant(Matrix::Ones(1, 1));
  const auto order = topological_order(output.node());
  try {
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Node* node = *it;
      if (node->is_leaf || !node->backward) continue;
      auto found = grads.find(node);
      if (found == grads.end()) continue;
      const Tensor g = found->second;
      auto input_grads = node->backward(g);
      for (std::size_t k = 0; k < node->inputs.size(); ++k) {
        Node* in = node->inputs[k].node();
        if (!in || !in->requires_grad || !input_grads[k].defined()) continue;
        auto [slot, inserted] = grads.try_emplace(in, input_grads[k]);
        if (!inserted) slot->second = add(slot->second, input_grads[k]);
      }
    }
  } catch (...) {
    g_grad_enabled = previous;
    throw;
  }
  g_grad_enabled = previous;
  return grads;
}

}  // namespace

Tensor::Tensor(Matrix value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::scalar(Scalar v) { return constant(Matrix::Constant(1, 1, v)); }

Matrix& Tensor::mutable_value() {
  if (!node_->is_leaf) throw UsageError("only leaf tensors can be modified in place");
  return node_->value;
}

void Tensor::zero_grad() { node_->grad.setZero(node_->value.rows(), node_->value.cols()); }

Scalar Tensor::item() const {
  if (rows() != 1 || cols() != 1) throw ShapeError("item() requires a 1x1 tensor");
  return node_->value(0, 0);
}

Tensor make_result(Matrix value, std::vector<Tensor> inputs,
                   std::function<std::vector<Tensor>(const Tensor&)> backward) {
  Tensor out(std::move(value), false);
  if (!g_grad_enabled) return out;
  bool any = false;
  for (const auto& in : inputs) any = any || in.requires_grad();
  if (!any) return out;
  out.node_->requires_grad = true;
  out.node_->is_leaf = false;
  out.node_->inputs = std::move(inputs);
  out.node_->backward = std::move(backward);
  return out;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

void backward(const Tensor& output) {
  const auto grads = run_backward(output, false);
  for (const auto& [node, g] : grads) {
    if (!node->is_leaf) continue;
    if (node->grad.rows() != node->value.rows() || node->grad.cols() != node->value.cols()) {
      node->grad.setZero(node->value.rows(), node->value.cols());
    }
    node->grad += g.value();
  }
}

std::vector<Tensor> grad(const Tensor& output, const std::vector<Tensor>& inputs, bool create_graph) {
  const auto grads = run_backward(output, create_graph);
  std::vector<Tensor> result;
  result.reserve(inputs.size());
  for (const auto& in : inputs) {
    auto it = grads.find(in.node());
    result.push_back(it != grads.end() ? it->second : Tensor::constant(Matrix::Zero(in.rows(), in.cols())));
  }
  return result;
}

// --- ops -------------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  return make_result(a.value() + b.value(), {a, b}, [](const Tensor& g) {
    return std::vector<Tensor>{g, g};
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  return make_result(a.value() - b.value(), {a, b}, [](const Tensor& g) {
    return std::vector<Tensor>{g, neg(g)};
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  return make_result(a.value().cwiseProduct(b.value()), {a, b}, [a, b](const Tensor& g) {
    return std::vector<Tensor>{mul(g, b), mul(g, a)};
  });
}

Tensor neg(const Tensor& a) { return scale(a, Scalar(-1)); }

Tensor scale(const Tensor& a, Scalar s) {
  return make_result(a.value() * s, {a}, [s](const Tensor& g) {
    return std::vector<Tensor>{scale(g, s)};
  });
}

Tensor add_scalar(const Tensor& a, Scalar s) {
  return make_result((a.value().array() + s).matrix(), {a}, [](const Tensor& g) {
    return std::vector<Tensor>{g};
  });
}

Tensor mul_const(const Tensor& a, const Matrix& m) {
  if (a.rows() != m.rows() || a.cols() != m.cols()) throw ShapeError("mul_const: shape mismatch");
  return make_result(a.value().cwiseProduct(m), {a}, [m](const Tensor& g) {
    return std::vector<Tensor>{mul_const(g, m)};
  });
}

Tensor mul_row_const(const Tensor& a, const RowVector& row) {
  if (a.cols() != row.cols()) throw ShapeError("mul_row_const: column mismatch");
  Matrix out = (a.value().array().rowwise() * row.array()).matrix();
  return make_result(std::move(out), {a}, [row](const Tensor& g) {
    return std::vector<Tensor>{mul_row_const(g, row)};
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()) + ")");
  }
  Matrix out = a.value() * b.value();
  return make_result(std::move(out), {a, b}, [a, b](const Tensor& g) {
    std::vector<Tensor> r(2);
    if (a.requires_grad()) r[0] = matmul(g, transpose(b));
    if (b.requires_grad()) r[1] = matmul(transpose(a), g);
    return r;
  });
}

Tensor transpose(const Tensor& a) {
  return make_result(a.value().transpose(), {a}, [](const Tensor& g) {
    return std::vector<Tensor>{transpose(g)};
  });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  if (x.cols() != weight.cols()) {
    throw ShapeError("linear: input width " + std::to_string(x.cols()) + " does not match weight " +
                     std::to_string(weight.rows()) + "x" + std::to_string(weight.cols()));
  }
  if (bias.rows() != 1 || bias.cols() != weight.rows()) throw ShapeError("linear: bias shape mismatch");
  Matrix out = x.value() * weight.value().transpose();
  out.rowwise() += bias.value().row(0);
  return make_result(std::move(out), {x, weight, bias}, [x, weight, bias](const Tensor& g) {
    std::vector<Tensor> r(3);
    if (x.requires_grad()) r[0] = matmul(g, weight);
    if (weight.requires_grad()) r[1] = matmul(transpose(g), x);
    if (bias.requires_grad()) r[2] = sum_rows(g);
    return r;
  });
}

Tensor add_row(const Tensor& a, const Tensor& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) throw ShapeError("add_row: row shape mismatch");
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  return make_result(std::move(out), {a, row}, [](const Tensor& g) {
    return std::vector<Tensor>{g, sum_rows(g)};
  });
}

Tensor sum_rows(const Tensor& a) {
  const Index m = a.rows();
  return make_result(a.value().colwise().sum(), {a}, [m](const Tensor& g) {
    return std::vector<Tensor>{broadcast_rows(g, m)};
  });
}

Tensor broadcast_rows(const Tensor& row, Index rows) {
  if (row.rows() != 1) throw ShapeError("broadcast_rows: expected a single row");
  Matrix out = row.value().replicate(rows, 1);
  return make_result(std::move(out), {row}, [](const Tensor& g) {
    return std::vector<Tensor>{sum_rows(g)};
  });
}

Tensor sum_cols(const Tensor& a) {
  const Index n = a.cols();
  return make_result(a.value().rowwise().sum(), {a}, [n](const Tensor& g) {
    return std::vector<Tensor>{broadcast_cols(g, n)};
  });
}

Tensor broadcast_cols(const Tensor& col, Index cols) {
  if (col.cols() != 1) throw ShapeError("broadcast_cols: expected a single column");
  Matrix out = col.value().replicate(1, cols);
  return make_result(std::move(out), {col}, [](const Tensor& g) {
    return std::vector<Tensor>{sum_cols(g)};
  });
}

Tensor sum(const Tensor& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  return make_result(Matrix::Constant(1, 1, a.value().sum()), {a}, [m, n](const Tensor& g) {
    return std::vector<Tensor>{broadcast_scalar(g, m, n)};
  });
}

Tensor mean(const Tensor& a) {
  if (a.value().size() == 0) throw ShapeError("mean of an empty tensor");
  return scale(sum(a), Scalar(1) / static_cast<Scalar>(a.value().size()));
}

Tensor broadcast_scalar(const Tensor& s, Index rows, Index cols) {
  if (s.rows() != 1 || s.cols() != 1) throw ShapeError("broadcast_scalar: expected 1x1");
  return make_result(Matrix::Constant(rows, cols, s.value()(0, 0)), {s}, [](const Tensor& g) {
    return std::vector<Tensor>{sum(g)};
  });
}

Tensor pow(const Tensor& a, Scalar exponent) {
  Matrix out = a.value().array().pow(exponent).matrix();
  return make_result(std::move(out), {a}, [a, exponent](const Tensor& g) {
    if (exponent == Scalar(1)) return std::vector<Tensor>{g};
    return std::vector<Tensor>{mul(g, scale(pow(a, exponent - 1), exponent))};
  });
}

Tensor leaky_relu(const Tensor& a, Scalar slope) {
  Matrix mask = ((a.value().array() > 0).cast<Scalar>() * (1 - slope) + slope).matrix();
  Matrix out = a.value().cwiseProduct(mask);
  return make_result(std::move(out), {a}, [mask = std::move(mask)](const Tensor& g) {
    return std::vector<Tensor>{mul_const(g, mask)};
  });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: nothing to concatenate");
  const Index m = parts.front().rows();
  Index total = 0;
  for (const auto& p : parts) {
    if (p.rows() != m) throw ShapeError("concat_cols: row counts differ");
    total += p.cols();
  }
  Matrix out(m, total);
  std::vector<Index> offsets;
  Index at = 0;
  for (const auto& p : parts) {
    offsets.push_back(at);
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  std::vector<Index> widths;
  for (const auto& p : parts) widths.push_back(p.cols());
  return make_result(std::move(out), parts, [offsets, widths](const Tensor& g) {
    std::vector<Tensor> r;
    for (std::size_t k = 0; k < offsets.size(); ++k) r.push_back(slice_cols(g, offsets[k], widths[k]));
    return r;
  });
}

Tensor slice_cols(const Tensor& a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) throw ShapeError("slice_cols: out of range");
  const Index total = a.cols();
  return make_result(a.value().middleCols(start, count), {a}, [start, total](const Tensor& g) {
    return std::vector<Tensor>{pad_cols(g, start, total)};
  });
}

Tensor pad_cols(const Tensor& a, Index start, Index total) {
  if (start < 0 || start + a.cols() > total) throw ShapeError("pad_cols: out of range");
  Matrix out = Matrix::Zero(a.rows(), total);
  out.middleCols(start, a.cols()) = a.value();
  const Index count = a.cols();
  return make_result(std::move(out), {a}, [start, count](const Tensor& g) {
    return std::vector<Tensor>{slice_cols(g, start, count)};
  });
}

}  // namespace synclift::nn
