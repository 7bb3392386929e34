// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <map>

#include "gap/error.hpp"
#include "gap/text.hpp"

namespace gap {

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, std::size_t> ngram_counts(const std::vector<std::string>& toks, std::size_t n) {
  std::map<Ngram, std::size_t> counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++counts[Ngram(toks.begin() + static_cast<long>(i), toks.begin() + static_cast<long>(i + n))];
  }
  return counts;
}

bool contains_run(const std::vector<std::string>& text, const std::vector<std::string>& run) {
  if (run.empty() || run.size() > text.size()) return false;
  return std::search(text.begin(), text.end(), run.begin(), run.end()) != text.end();
}

}  // namespace

double bleu(const std::vector<std::string>& hypotheses,
            const std::vector<std::vector<std::string>>& references) {
  if (hypotheses.empty()) throw Error(ErrorCode::EmptyInput, "no hypotheses");
  if (hypotheses.size() != references.size()) {
    throw Error(ErrorCode::ShapeMismatch, "hypothesis and reference counts differ");
  }
  constexpr std::size_t kOrder = 4;
  std::array<double, kOrder> matched{};
  std::array<double, kOrder> total{};
  double hyp_len = 0.0;
  double ref_len = 0.0;

  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    if (references[s].empty()) throw Error(ErrorCode::EmptyInput, "example without references");
    const auto hyp = tokenize(hypotheses[s]);
    std::vector<std::vector<std::string>> refs;
    for (const auto& r : references[s]) refs.push_back(tokenize(r));

    hyp_len += static_cast<double>(hyp.size());
    std::size_t closest = refs[0].size();
    for (const auto& r : refs) {
      const auto diff = [&](std::size_t len) {
        return std::abs(static_cast<long>(len) - static_cast<long>(hyp.size()));
      };
      if (diff(r.size()) < diff(closest) || (diff(r.size()) == diff(closest) && r.size() < closest)) {
        closest = r.size();
      }
    }
    ref_len += static_cast<double>(closest);

    for (std::size_t n = 1; n <= kOrder; ++n) {
      const auto hc = ngram_counts(hyp, n);
      std::map<Ngram, std::size_t> max_ref;
      for (const auto& r : refs) {
        for (const auto& [g, c] : ngram_counts(r, n)) max_ref[g] = std::max(max_ref[g], c);
      }
      for (const auto& [g, c] : hc) {
        auto it = max_ref.find(g);
        matched[n - 1] += static_cast<double>(it == max_ref.end() ? 0 : std::min(c, it->second));
        total[n - 1] += static_cast<double>(c);
      }
    }
  }

  if (hyp_len == 0.0 || matched[0] == 0.0) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < kOrder; ++n) {
    double p = n > 0 && matched[n] == 0.0 ? 1.0 / (total[n] + 1.0) : matched[n] / total[n];
    log_sum += std::log(p);
  }
  const double bp = hyp_len >= ref_len ? 1.0 : std::exp(1.0 - ref_len / hyp_len);
  return 100.0 * bp * std::exp(log_sum / static_cast<double>(kOrder));
}

double bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references) {
  std::vector<std::vector<std::string>> refs;
  refs.reserve(references.size());
  for (const auto& r : references) refs.push_back({r});
  return bleu(hypotheses, refs);
}

std::optional<double> entity_accuracy(const KnowledgeGraph& kg, const std::string& hypothesis,
                                      const std::string& reference) {
  const auto hyp = tokenize(hypothesis);
  const auto ref = tokenize(reference);
  std::size_t in_hyp = 0;
  std::size_t in_ref = 0;
  for (const auto& e : kg.entities) {
    const auto label = tokenize(e.label);
    if (contains_run(hyp, label)) ++in_hyp;
    if (contains_run(ref, label)) ++in_ref;
  }
  if (in_ref == 0) return std::nullopt;
  return 100.0 * static_cast<double>(in_hyp) / static_cast<double>(in_ref);
}

EvalReport evaluate_predictions(const std::vector<Example>& examples,
                                const std::vector<std::string>& hypotheses) {
  if (examples.size() != hypotheses.size()) {
    throw Error(ErrorCode::ShapeMismatch, "one hypothesis per example expected");
  }
  EvalReport report;
  report.examples = examples.size();
  std::vector<std::vector<std::string>> refs;
  for (const auto& ex : examples) refs.push_back(ex.references);
  report.bleu = bleu(hypotheses, refs);
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto acc = entity_accuracy(examples[i].graph, hypotheses[i], examples[i].references.front());
    if (acc) {
      sum += *acc;
      ++defined;
    }
    report.entity_accuracy.push_back(acc);
  }
  if (defined) report.mean_entity_accuracy = sum / static_cast<double>(defined);
  return report;
}

}  // namespace gap
