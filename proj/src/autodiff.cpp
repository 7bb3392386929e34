// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/autodiff.hpp"

#include <cmath>

#include "gap/error.hpp"

namespace gap {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::ShapeMismatch, what);
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)

}  // namespace

Var Tape::push(Matrix value, bool needs_grad, std::function<void(Tape&, const Matrix&)> backward) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad && requires_grad_;
  if (n.needs_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Tape::constant(Matrix value) { return push(std::move(value), false, nullptr); }

Var Tape::parameter(const Parameter& p) {
  Node n;
  n.param = const_cast<Parameter*>(&p);
  n.needs_grad = requires_grad_;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Matrix& Tape::grad_of(std::size_t id) {
  Node& n = nodes_[id];
  if (n.param) return n.param->grad;
  if (n.grad.empty()) n.grad = Matrix(value_of(n).rows(), value_of(n).cols());
  return n.grad;
}

void Tape::accumulate(Var v, const Matrix& g) {
  if (!needs(v)) return;
  add_inplace(grad_of(v.id), g);
}

void Tape::backward(Var out) {
  require(value(out).rows() == 1 && value(out).cols() == 1, "backward needs a scalar");
  if (!requires_grad_) return;
  grad_of(out.id)(0, 0) += 1.0;
  for (std::size_t i = out.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.needs_grad || !n.backward || n.grad.empty()) continue;
    n.backward(*this, n.grad);
  }
}

Var Tape::add(Var a, Var b) {
  Matrix out = value(a);
  add_inplace(out, value(b));
  return push(std::move(out), needs(a) || needs(b), [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var Tape::matmul(Var a, Var b) {
  return push(gap::matmul(value(a), value(b)), needs(a) || needs(b), [a, b](Tape& t, const Matrix& g) {
    if (t.needs(a)) matmul_bt_acc(g, t.value(b), t.grad_of(a.id));
    if (t.needs(b)) matmul_at_acc(t.value(a), g, t.grad_of(b.id));
  });
}

Var Tape::matmul_bt(Var a, Var b) {
  return push(gap::matmul_bt(value(a), value(b)), needs(a) || needs(b), [a, b](Tape& t, const Matrix& g) {
    if (t.needs(a)) matmul_acc(g, t.value(b), t.grad_of(a.id));
    if (t.needs(b)) matmul_at_acc(g, t.value(a), t.grad_of(b.id));
  });
}

Var Tape::add_row(Var a, Var row) {
  const Matrix& x = value(a);
  const Matrix& r = value(row);
  require(r.rows() == 1 && r.cols() == x.cols(), "add_row");
  Matrix out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto orow = out.row(i);
    for (std::size_t j = 0; j < out.cols(); ++j) orow[j] += r(0, j);
  }
  return push(std::move(out), needs(a) || needs(row), [a, row](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    if (t.needs(row)) {
      Matrix& gr = t.grad_of(row.id);
      for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) gr(0, j) += g(i, j);
      }
    }
  });
}

Var Tape::gelu(Var a) {
  Matrix out = value(a);
  for (double& x : out.values()) {
    x = 0.5 * x * (1.0 + std::tanh(kGeluC * (x + 0.044715 * x * x * x)));
  }
  return push(std::move(out), needs(a), [a](Tape& t, const Matrix& g) {
    const Matrix& x = t.value(a);
    Matrix dx(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = x.data()[i];
      const double u = kGeluC * (v + 0.044715 * v * v * v);
      const double th = std::tanh(u);
      const double du = kGeluC * (1.0 + 3.0 * 0.044715 * v * v);
      dx.data()[i] = g.data()[i] * (0.5 * (1.0 + th) + 0.5 * v * (1.0 - th * th) * du);
    }
    t.accumulate(a, dx);
  });
}

Var Tape::layer_norm(Var x, Var gain, Var bias, double eps) {
  const Matrix& in = value(x);
  const Matrix& gm = value(gain);
  const Matrix& bm = value(bias);
  const std::size_t n = in.rows(), d = in.cols();
  require(gm.rows() == 1 && gm.cols() == d && bm.rows() == 1 && bm.cols() == d, "layer_norm");
  auto xhat = std::make_shared<Matrix>(n, d);
  auto inv_std = std::make_shared<std::vector<double>>(n);
  Matrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = in.row(i);
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : r) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[i] = is;
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (r[j] - mean) * is;
      (*xhat)(i, j) = h;
      out(i, j) = h * gm(0, j) + bm(0, j);
    }
  }
  return push(std::move(out), needs(x) || needs(gain) || needs(bias),
              [x, gain, bias, xhat, inv_std](Tape& t, const Matrix& g) {
                const std::size_t n = g.rows(), d = g.cols();
                const Matrix& gm = t.value(gain);
                if (t.needs(gain) || t.needs(bias)) {
                  Matrix dg(1, d), db(1, d);
                  for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < d; ++j) {
                      dg(0, j) += g(i, j) * (*xhat)(i, j);
                      db(0, j) += g(i, j);
                    }
                  }
                  t.accumulate(gain, dg);
                  t.accumulate(bias, db);
                }
                if (!t.needs(x)) return;
                Matrix dx(n, d);
                for (std::size_t i = 0; i < n; ++i) {
                  double mean_dh = 0.0, mean_dh_h = 0.0;
                  for (std::size_t j = 0; j < d; ++j) {
                    const double dh = g(i, j) * gm(0, j);
                    mean_dh += dh;
                    mean_dh_h += dh * (*xhat)(i, j);
                  }
                  mean_dh /= static_cast<double>(d);
                  mean_dh_h /= static_cast<double>(d);
                  for (std::size_t j = 0; j < d; ++j) {
                    const double dh = g(i, j) * gm(0, j);
                    dx(i, j) = (*inv_std)[i] * (dh - mean_dh - (*xhat)(i, j) * mean_dh_h);
                  }
                }
                t.accumulate(x, dx);
              });
}

Var Tape::embedding(Var table, std::span<const TokenId> ids) {
  const Matrix& tab = value(table);
  Matrix out(ids.size(), tab.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto id = static_cast<std::size_t>(ids[i]);
    if (ids[i] < 0 || id >= tab.rows()) {
      throw Error(ErrorCode::IndexOutOfRange, "token id " + std::to_string(ids[i]));
    }
    std::copy(tab.row(id).begin(), tab.row(id).end(), out.row(i).begin());
  }
  std::vector<TokenId> idv(ids.begin(), ids.end());
  return push(std::move(out), needs(table), [table, idv = std::move(idv)](Tape& t, const Matrix& g) {
    Matrix& gt = t.grad_of(table.id);
    for (std::size_t i = 0; i < idv.size(); ++i) {
      auto grow = gt.row(static_cast<std::size_t>(idv[i]));
      const auto src = g.row(i);
      for (std::size_t j = 0; j < grow.size(); ++j) grow[j] += src[j];
    }
  });
}

Var Tape::leading_rows(Var table, std::size_t count) {
  const Matrix& tab = value(table);
  if (count > tab.rows()) {
    throw Error(ErrorCode::LengthOverflow, std::to_string(count) + " positions requested, " +
                                               std::to_string(tab.rows()) + " available");
  }
  Matrix out(count, tab.cols());
  std::copy_n(tab.data(), count * tab.cols(), out.data());
  return push(std::move(out), needs(table), [table](Tape& t, const Matrix& g) {
    Matrix& gt = t.grad_of(table.id);
    for (std::size_t i = 0; i < g.size(); ++i) gt.data()[i] += g.data()[i];
  });
}

Var Tape::attention(Var q, Var k, Var v, Var bias, std::size_t heads,
                    std::shared_ptr<AttentionOutput>* record) {
  static const Matrix kNoBias;
  auto fwd = std::make_shared<AttentionOutput>(
      multi_head_attention(value(q), value(k), value(v), bias.valid() ? value(bias) : kNoBias, heads));
  Matrix out = fwd->output;
  if (record) *record = fwd;
  const bool bias_grad = bias.valid() && needs(bias);
  return push(std::move(out), needs(q) || needs(k) || needs(v) || bias_grad,
              [q, k, v, bias, heads, bias_grad, fwd](Tape& t, const Matrix& g) {
                AttentionGrads ag = multi_head_attention_backward(t.value(q), t.value(k), t.value(v),
                                                                  *fwd, g, heads, bias_grad);
                t.accumulate(q, ag.dq);
                t.accumulate(k, ag.dk);
                t.accumulate(v, ag.dv);
                if (bias_grad) t.accumulate(bias, ag.dbias);
              });
}

Var Tape::type_bias(Var gamma, const TypeMatrix& types, const Matrix& mask) {
  const Matrix& gm = value(gamma);
  require(gm.rows() == static_cast<std::size_t>(kTypeCount) && gm.cols() == 1, "type table shape");
  require(mask.rows() == types.slots && mask.cols() == types.slots, "mask/type shape");
  Matrix out = gap::type_bias(gm.values(), types);
  add_inplace(out, mask);
  return push(std::move(out), needs(gamma), [gamma, types](Tape& t, const Matrix& g) {
    const auto dg = type_bias_backward(g, types);
    Matrix d(kTypeCount, 1);
    for (int i = 0; i < kTypeCount; ++i) d(static_cast<std::size_t>(i), 0) = dg[static_cast<std::size_t>(i)];
    t.accumulate(gamma, d);
  });
}

Var Tape::pool(Var x, const std::vector<std::vector<Span>>& spans, std::size_t m_slots) {
  const std::size_t n = value(x).rows();
  return push(pool_components(value(x), spans, m_slots), needs(x), [x, spans, n](Tape& t, const Matrix& g) {
    t.accumulate(x, pool_components_backward(g, spans, n));
  });
}

Var Tape::gather_residual(Var graph_states, const std::vector<std::vector<Span>>& spans, Var x) {
  const std::size_t m = value(graph_states).rows();
  return push(gap::gather_residual(value(graph_states), spans, value(x)),
              needs(graph_states) || needs(x), [graph_states, spans, x, m](Tape& t, const Matrix& g) {
                t.accumulate(x, g);
                if (t.needs(graph_states)) t.accumulate(graph_states, gather_backward(g, spans, m));
              });
}

Var Tape::custom(Var input, Matrix value, std::function<Matrix(const Matrix&)> grad_fn) {
  return push(std::move(value), needs(input), [input, grad_fn = std::move(grad_fn)](Tape& t, const Matrix& g) {
    t.accumulate(input, grad_fn(g));
  });
}

}  // namespace gap
