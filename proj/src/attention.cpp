// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/attention.hpp"

#include <algorithm>
#include <cmath>

#include "gap/error.hpp"

namespace gap {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::ShapeMismatch, what);
}

void check_spans(const std::vector<std::vector<Span>>& spans, std::size_t tokens,
                 std::size_t m_slots) {
  require(spans.size() <= m_slots, "more components than slots");
  for (std::size_t c = 0; c < spans.size(); ++c) {
    std::size_t covered = 0;
    for (const Span& s : spans[c]) {
      require(s.start <= s.end && s.end <= tokens, "span outside the token range");
      covered += s.length();
    }
    if (covered == 0) {
      throw Error(ErrorCode::EmptySpans, "component " + std::to_string(c) + " covers no tokens");
    }
  }
}

}  // namespace

AttentionOutput multi_head_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                                     const Matrix& bias, std::size_t heads) {
  const std::size_t n = q.rows();
  const std::size_t m = k.rows();
  const std::size_t d = q.cols();
  const std::size_t dv = v.cols();
  require(heads > 0 && d % heads == 0 && dv % heads == 0, "head count must divide the width");
  require(k.cols() == d && v.rows() == m, "q/k/v shapes");
  require(bias.empty() || (bias.rows() == n && bias.cols() == m), "bias shape");
  const std::size_t dh = d / heads;
  const std::size_t dvh = dv / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  AttentionOutput out;
  out.output = Matrix(n, dv);
  out.blocked_rows.assign(n, false);
  if (!bias.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = bias.row(i);
      out.blocked_rows[i] =
          std::all_of(row.begin(), row.end(), [](double b) { return b <= kBlockedThreshold; });
    }
  }

  std::vector<double> scores(m);
  for (std::size_t h = 0; h < heads; ++h) {
    Matrix probs(n, m);
    const std::size_t off = h * dh;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.blocked_rows[i]) continue;
      const double* qi = q.data() + i * d + off;
      double mx = -INFINITY;
      for (std::size_t j = 0; j < m; ++j) {
        const double* kj = k.data() + j * d + off;
        double s = 0.0;
        for (std::size_t p = 0; p < dh; ++p) s += qi[p] * kj[p];
        s *= scale;
        if (!bias.empty()) s += bias(i, j);
        scores[j] = s;
        mx = std::max(mx, s);
      }
      double total = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        scores[j] = std::exp(scores[j] - mx);
        total += scores[j];
      }
      double* oi = out.output.data() + i * dv + h * dvh;
      for (std::size_t j = 0; j < m; ++j) {
        const double pj = scores[j] / total;
        probs(i, j) = pj;
        if (pj == 0.0) continue;
        const double* vj = v.data() + j * dv + h * dvh;
        for (std::size_t p = 0; p < dvh; ++p) oi[p] += pj * vj[p];
      }
    }
    out.probs.push_back(std::move(probs));
  }
  return out;
}

AttentionGrads multi_head_attention_backward(const Matrix& q, const Matrix& k, const Matrix& v,
                                             const AttentionOutput& forward, const Matrix& d_output,
                                             std::size_t heads, bool bias_grad) {
  const std::size_t n = q.rows();
  const std::size_t m = k.rows();
  const std::size_t d = q.cols();
  const std::size_t dv = v.cols();
  require(d_output.rows() == n && d_output.cols() == dv, "attention gradient shape");
  const std::size_t dh = d / heads;
  const std::size_t dvh = dv / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  AttentionGrads g{Matrix(n, d), Matrix(m, d), Matrix(m, dv), bias_grad ? Matrix(n, m) : Matrix()};
  std::vector<double> dp(m);
  for (std::size_t h = 0; h < heads; ++h) {
    const Matrix& probs = forward.probs[h];
    const std::size_t off = h * dh;
    for (std::size_t i = 0; i < n; ++i) {
      if (forward.blocked_rows[i]) continue;
      const double* doi = d_output.data() + i * dv + h * dvh;
      // dP_ij = dO_i . V_j ; dS_ij = P_ij (dP_ij - sum_j P_ij dP_ij)
      double dot = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double* vj = v.data() + j * dv + h * dvh;
        double s = 0.0;
        for (std::size_t p = 0; p < dvh; ++p) s += doi[p] * vj[p];
        dp[j] = s;
        dot += probs(i, j) * s;
      }
      const double* qi = q.data() + i * d + off;
      double* dqi = g.dq.data() + i * d + off;
      for (std::size_t j = 0; j < m; ++j) {
        const double pj = probs(i, j);
        if (pj == 0.0) continue;
        double* dvj = g.dv.data() + j * dv + h * dvh;
        for (std::size_t p = 0; p < dvh; ++p) dvj[p] += pj * doi[p];
        const double ds = pj * (dp[j] - dot);
        if (bias_grad) g.dbias(i, j) += ds;
        const double dss = ds * scale;
        const double* kj = k.data() + j * d + off;
        double* dkj = g.dk.data() + j * d + off;
        for (std::size_t p = 0; p < dh; ++p) {
          dqi[p] += dss * kj[p];
          dkj[p] += dss * qi[p];
        }
      }
    }
  }
  return g;
}

Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v, const Matrix& bias) {
  return multi_head_attention(q, k, v, bias, 1).output;
}

Matrix head_average(const AttentionOutput& out) {
  if (out.probs.empty()) return {};
  Matrix avg(out.probs[0].rows(), out.probs[0].cols());
  for (const Matrix& p : out.probs) add_inplace(avg, p);
  const double inv = 1.0 / static_cast<double>(out.probs.size());
  for (double& x : avg.values()) x *= inv;
  return avg;
}

Matrix pool_components(const Matrix& token_states, const std::vector<std::vector<Span>>& spans,
                       std::size_t m_slots) {
  check_spans(spans, token_states.rows(), m_slots);
  const std::size_t d = token_states.cols();
  Matrix out(m_slots, d);
  for (std::size_t c = 0; c < spans.size(); ++c) {
    std::size_t count = 0;
    auto orow = out.row(c);
    for (const Span& s : spans[c]) {
      for (std::size_t t = s.start; t < s.end; ++t, ++count) {
        const auto trow = token_states.row(t);
        for (std::size_t p = 0; p < d; ++p) orow[p] += trow[p];
      }
    }
    const double inv = 1.0 / static_cast<double>(count);
    for (double& x : orow) x *= inv;
  }
  return out;
}

Matrix pool_components_backward(const Matrix& d_pooled, const std::vector<std::vector<Span>>& spans,
                                std::size_t token_count) {
  const std::size_t d = d_pooled.cols();
  Matrix out(token_count, d);
  for (std::size_t c = 0; c < spans.size(); ++c) {
    std::size_t count = 0;
    for (const Span& s : spans[c]) count += s.length();
    const double inv = 1.0 / static_cast<double>(count);
    const auto grow = d_pooled.row(c);
    for (const Span& s : spans[c]) {
      for (std::size_t t = s.start; t < s.end; ++t) {
        auto orow = out.row(t);
        for (std::size_t p = 0; p < d; ++p) orow[p] += grow[p] * inv;
      }
    }
  }
  return out;
}

Matrix type_bias(std::span<const double> gamma, const TypeMatrix& types) {
  require(gamma.size() >= static_cast<std::size_t>(kTypeCount), "type table size");
  Matrix out(types.slots, types.slots);
  for (std::size_t i = 0; i < types.slots; ++i) {
    for (std::size_t j = 0; j < types.slots; ++j) {
      const int t = types.at(i, j);
      if (t < 0 || t >= kTypeCount) {
        throw Error(ErrorCode::UnknownType, "connection type " + std::to_string(t));
      }
      if (t != 0) out(i, j) = gamma[static_cast<std::size_t>(t)];
    }
  }
  return out;
}

std::vector<double> type_bias_backward(const Matrix& d_bias, const TypeMatrix& types) {
  std::vector<double> g(kTypeCount, 0.0);
  for (std::size_t i = 0; i < types.slots; ++i) {
    for (std::size_t j = 0; j < types.slots; ++j) {
      const int t = types.at(i, j);
      if (t != 0) g[static_cast<std::size_t>(t)] += d_bias(i, j);
    }
  }
  return g;
}

Matrix gather_residual(const Matrix& graph_states, const std::vector<std::vector<Span>>& spans,
                       const Matrix& token_states) {
  require(graph_states.cols() == token_states.cols(), "gather width");
  check_spans(spans, token_states.rows(), graph_states.rows());
  Matrix out = token_states;
  const std::size_t d = token_states.cols();
  for (std::size_t c = 0; c < spans.size(); ++c) {
    const auto grow = graph_states.row(c);
    for (const Span& s : spans[c]) {
      for (std::size_t t = s.start; t < s.end; ++t) {
        auto orow = out.row(t);
        for (std::size_t p = 0; p < d; ++p) orow[p] += grow[p];
      }
    }
  }
  return out;
}

Matrix gather_backward(const Matrix& d_output, const std::vector<std::vector<Span>>& spans,
                       std::size_t m_slots) {
  const std::size_t d = d_output.cols();
  Matrix out(m_slots, d);
  for (std::size_t c = 0; c < spans.size(); ++c) {
    auto orow = out.row(c);
    for (const Span& s : spans[c]) {
      for (std::size_t t = s.start; t < s.end; ++t) {
        const auto trow = d_output.row(t);
        for (std::size_t p = 0; p < d; ++p) orow[p] += trow[p];
      }
    }
  }
  return out;
}

}  // namespace gap
