// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gap/attention.hpp"
#include "gap/linearize.hpp"
#include "gap/matrix.hpp"
#include "gap/topology.hpp"
#include "gap/vocab.hpp"

namespace gap {

// A named learnable tensor with its gradient accumulator. Rows listed in
// `frozen_rows` are never changed by the optimizer.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  std::vector<std::size_t> frozen_rows;

  Parameter() = default;
  Parameter(std::string n, std::size_t rows, std::size_t cols)
      : name(std::move(n)), value(rows, cols), grad(rows, cols) {}

  void zero_grad() { grad.fill(0.0); }
};

// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t id = kNone;
  bool valid() const { return id != kNone; }
};

// Reverse-mode tape over dense matrices. Every op records its output and a
// closure that pushes the output gradient to its inputs; backward() replays
// the closures in reverse order and accumulates into Parameter::grad.
//
// A tape built with requires_grad = false records values only.
class Tape {
 public:
  explicit Tape(bool requires_grad = true) : requires_grad_(requires_grad) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  // Gradients flow into p.grad only when the tape records gradients, so a
  // no-grad tape never writes to p.
  Var parameter(const Parameter& p);
  const Matrix& value(Var v) const { return value_of(nodes_[v.id]); }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(out)/d(out) = 1 for a 1x1 output.
  void backward(Var out);

  Var add(Var a, Var b);
  Var matmul(Var a, Var b);
  Var matmul_bt(Var a, Var b);
  // Adds a 1 x cols row to every row of a.
  Var add_row(Var a, Var row);
  Var gelu(Var a);
  Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-5);
  // Rows `ids` of table.
  Var embedding(Var table, std::span<const TokenId> ids);
  // Rows [0, count) of table.
  Var leading_rows(Var table, std::size_t count);

  // Multi-head attention; `bias` may be invalid (no bias). When `record` is
  // non-null it receives the forward probabilities.
  Var attention(Var q, Var k, Var v, Var bias, std::size_t heads,
                std::shared_ptr<AttentionOutput>* record = nullptr);
  // mask + gamma(types), with gamma a kTypeCount x 1 table.
  Var type_bias(Var gamma, const TypeMatrix& types, const Matrix& mask);
  Var pool(Var x, const std::vector<std::vector<Span>>& spans, std::size_t m_slots);
  Var gather_residual(Var graph_states, const std::vector<std::vector<Span>>& spans, Var x);

  // Escape hatch for ops defined elsewhere: `grad_fn` maps the output
  // gradient to the input gradient.
  Var custom(Var input, Matrix value, std::function<Matrix(const Matrix&)> grad_fn);

 private:
  struct Node {
    Matrix value;
    Parameter* param = nullptr;
    Matrix grad;
    bool needs_grad = false;
    std::function<void(Tape&, const Matrix&)> backward;
  };

  static const Matrix& value_of(const Node& n) { return n.param ? n.param->value : n.value; }
  Matrix& grad_of(std::size_t id);
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }
  Var push(Matrix value, bool needs_grad, std::function<void(Tape&, const Matrix&)> backward);
  void accumulate(Var v, const Matrix& g);

  bool requires_grad_;
  std::deque<Node> nodes_;
};

}  // namespace gap
