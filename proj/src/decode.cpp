// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/decode.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "gap/error.hpp"

namespace gap {

double length_normalized_score(double log_prob, std::size_t length, double alpha) {
  if (alpha == 0.0) return log_prob;
  return log_prob / std::pow((5.0 + static_cast<double>(length)) / 6.0, alpha);
}

namespace {

bool generatable(std::size_t id) {
  return id != static_cast<std::size_t>(special::kPad) && id != static_cast<std::size_t>(special::kBos);
}

struct Candidate {
  std::size_t parent;
  TokenId token;
  double log_prob;
};

std::vector<TokenId> with_bos(const std::vector<TokenId>& tokens) {
  std::vector<TokenId> prefix{special::kBos};
  prefix.insert(prefix.end(), tokens.begin(), tokens.end());
  return prefix;
}

bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.tokens < b.tokens;
}

}  // namespace

Hypothesis beam_search(const NextTokenScorer& scorer, const BeamConfig& config) {
  if (config.beam_size == 0 || config.max_len == 0) {
    throw Error(ErrorCode::InvalidConfig, "beam_size and max_len must be at least 1");
  }
  std::vector<Hypothesis> live{Hypothesis{}};
  std::vector<Hypothesis> finished;

  for (std::size_t step = 1; step <= config.max_len && !live.empty(); ++step) {
    std::vector<Candidate> candidates;
    for (std::size_t h = 0; h < live.size(); ++h) {
      const std::vector<double> lp = scorer(with_bos(live[h].tokens));
      for (std::size_t w = 0; w < lp.size(); ++w) {
        if (!generatable(w)) continue;
        candidates.push_back({h, static_cast<TokenId>(w), live[h].log_prob + lp[w]});
      }
    }
    // Live hypotheses share a length, so comparing parents then tokens is the
    // lexicographic order of the extended sequences.
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
      if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
      if (a.parent != b.parent) return live[a.parent].tokens < live[b.parent].tokens;
      return a.token < b.token;
    });

    std::vector<Hypothesis> next;
    for (std::size_t rank = 0; rank < candidates.size() && next.size() < config.beam_size; ++rank) {
      const Candidate& c = candidates[rank];
      Hypothesis hyp;
      hyp.tokens = live[c.parent].tokens;
      hyp.tokens.push_back(c.token);
      hyp.log_prob = c.log_prob;
      hyp.score = length_normalized_score(c.log_prob, hyp.tokens.size(), config.length_penalty);
      if (c.token == special::kEos) {
        if (rank < config.beam_size) {
          hyp.finished = true;
          finished.push_back(std::move(hyp));
        }
      } else {
        next.push_back(std::move(hyp));
      }
    }
    live = std::move(next);
    if (finished.size() >= config.beam_size) break;
  }

  const auto& pool = finished.empty() ? live : finished;
  return *std::min_element(pool.begin(), pool.end(), better);
}

Hypothesis greedy_decode(const NextTokenScorer& scorer, const BeamConfig& config) {
  Hypothesis hyp;
  for (std::size_t step = 0; step < config.max_len; ++step) {
    const std::vector<double> lp = scorer(with_bos(hyp.tokens));
    std::size_t best = lp.size();
    for (std::size_t w = 0; w < lp.size(); ++w) {
      if (generatable(w) && (best == lp.size() || lp[w] > lp[best])) best = w;
    }
    hyp.tokens.push_back(static_cast<TokenId>(best));
    hyp.log_prob += lp[best];
    if (best == static_cast<std::size_t>(special::kEos)) {
      hyp.finished = true;
      break;
    }
  }
  hyp.score = length_normalized_score(hyp.log_prob, hyp.tokens.size(), config.length_penalty);
  return hyp;
}

NextTokenScorer model_scorer(const Model& model, const GraphInputs& graph) {
  Tape tape(false);
  const Var enc = encode(tape, model, graph);
  auto states = std::make_shared<const Matrix>(tape.value(enc));
  return [&model, states](const std::vector<TokenId>& prefix) {
    Tape t(false);
    const Var logits = decoder_forward(t, model, t.constant(*states), prefix);
    const auto last = t.value(logits).row(prefix.size() - 1);
    double mx = -INFINITY;
    for (double v : last) mx = std::max(mx, v);
    double total = 0.0;
    for (double v : last) total += std::exp(v - mx);
    const double lse = mx + std::log(total);
    std::vector<double> out(last.size());
    for (std::size_t i = 0; i < last.size(); ++i) out[i] = last[i] - lse;
    return out;
  };
}

std::vector<TokenId> generate(const Model& model, const GraphInputs& graph, const BeamConfig& config) {
  BeamConfig cfg = config;
  // Generated tokens plus <s> must fit the position table.
  cfg.max_len = std::min(cfg.max_len, model.config().max_positions - 1);
  const NextTokenScorer scorer = model_scorer(model, graph);
  Hypothesis best = cfg.beam_size == 1 ? greedy_decode(scorer, cfg) : beam_search(scorer, cfg);
  if (!best.tokens.empty() && best.tokens.back() == special::kEos) best.tokens.pop_back();
  return best.tokens;
}

}  // namespace gap
