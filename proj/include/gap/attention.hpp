// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gap/linearize.hpp"
#include "gap/matrix.hpp"
#include "gap/topology.hpp"

namespace gap {

// A bias entry at or below this value counts as blocked. A query row whose
// every key is blocked produces a zero update instead of a softmax.
inline constexpr double kBlockedThreshold = kMaskBlocked / 2;

struct AttentionOutput {
  Matrix output;               // n x dv
  std::vector<Matrix> probs;   // per head, n x m post-softmax weights
  std::vector<bool> blocked_rows;
};

struct AttentionGrads {
  Matrix dq;
  Matrix dk;
  Matrix dv;
  Matrix dbias;  // summed over heads; empty when the forward had no bias
};

// softmax(Q K^T / sqrt(d_k) + bias) V per head, with the columns of q, k and v
// split evenly across `heads` (d_k is the per-head width of q) and the bias
// shared by every head. An empty
// bias means no bias. Throws ShapeMismatch.
AttentionOutput multi_head_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                                     const Matrix& bias, std::size_t heads);

AttentionGrads multi_head_attention_backward(const Matrix& q, const Matrix& k, const Matrix& v,
                                             const AttentionOutput& forward, const Matrix& d_output,
                                             std::size_t heads, bool bias_grad);

// Single-head convenience form.
Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v, const Matrix& bias = {});

// Post-softmax weights averaged over heads.
Matrix head_average(const AttentionOutput& out);

// Row c is the mean of all token rows covered by component c's spans; rows
// from spans.size() up to m_slots are zero. Throws EmptySpans.
Matrix pool_components(const Matrix& token_states, const std::vector<std::vector<Span>>& spans,
                       std::size_t m_slots);
// Gradient of pool_components with respect to token_states.
Matrix pool_components_backward(const Matrix& d_pooled, const std::vector<std::vector<Span>>& spans,
                                std::size_t token_count);

// gamma[T_ij], with T_ij == 0 giving exactly 0 whatever gamma[0] holds.
// Throws UnknownType.
Matrix type_bias(std::span<const double> gamma, const TypeMatrix& types);
// d loss / d gamma[k] = sum of d_bias over entries typed k; entry 0 stays 0.
std::vector<double> type_bias_backward(const Matrix& d_bias, const TypeMatrix& types);

// token_states[t] + graph_states[c] for every token t in a span of c;
// other tokens pass through unchanged.
Matrix gather_residual(const Matrix& graph_states, const std::vector<std::vector<Span>>& spans,
                       const Matrix& token_states);
// Gradient with respect to graph_states (the token_states gradient is the
// incoming gradient itself).
Matrix gather_backward(const Matrix& d_output, const std::vector<std::vector<Span>>& spans,
                       std::size_t m_slots);

}  // namespace gap
