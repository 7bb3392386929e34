// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "gap/model.hpp"
#include "gap/vocab.hpp"

namespace gap {

struct BeamConfig {
  std::size_t beam_size = 5;
  // Exponent of the length normalization ((5 + len) / 6)^alpha.
  double length_penalty = 1.0;
  // Maximum number of generated tokens, </s> included.
  std::size_t max_len = 64;
};

// Next-token log-probabilities (one per vocabulary id) given a prefix that
// starts with <s>.
using NextTokenScorer = std::function<std::vector<double>(const std::vector<TokenId>& prefix)>;

struct Hypothesis {
  std::vector<TokenId> tokens;  // generated tokens, <s> excluded
  double log_prob = 0.0;
  double score = 0.0;           // length-normalized log_prob
  bool finished = false;        // ends with </s>
};

double length_normalized_score(double log_prob, std::size_t length, double alpha);

// Beam search over a generic scorer. <pad> and <s> are never generated.
// Candidates rank by cumulative log-probability, ties by the lexicographically
// smaller token sequence. Search stops once beam_size hypotheses finished, no
// hypothesis is alive, or max_len tokens were generated; the best finished
// hypothesis by normalized score wins, else the best unfinished one.
Hypothesis beam_search(const NextTokenScorer& scorer, const BeamConfig& config);

// Argmax decoding, ties to the smaller token id.
Hypothesis greedy_decode(const NextTokenScorer& scorer, const BeamConfig& config);

// Encodes the graph once and scores prefixes with the decoder.
NextTokenScorer model_scorer(const Model& model, const GraphInputs& graph);

// Generated token ids (no <s>/</s>) using beam search (greedy when
// beam_size == 1).
std::vector<TokenId> generate(const Model& model, const GraphInputs& graph, const BeamConfig& config);

}  // namespace gap
