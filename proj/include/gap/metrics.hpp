// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gap/kg.hpp"

namespace gap {

// Corpus-level BLEU-4 on a 0-100 scale over lowercased whitespace tokens.
// Clipped n-gram counts are summed over the corpus, each hypothesis clipped
// against the maximum count in any of its references; the brevity penalty
// uses the closest reference length (shorter on ties). An order n > 1 with
// no corpus-wide match gets add-one smoothing, (0 + 1) / (total + 1), so
// short segments do not collapse to zero. Throws EmptyInput.
double bleu(const std::vector<std::string>& hypotheses,
            const std::vector<std::vector<std::string>>& references);

// Single-reference convenience form.
double bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references);

// 100 * (#KG entities whose lowercased label occurs as a contiguous token run
// in the hypothesis) / (same count for the reference). Empty when the
// reference realizes no entity. Not clipped at 100.
std::optional<double> entity_accuracy(const KnowledgeGraph& kg, const std::string& hypothesis,
                                      const std::string& reference);

struct EvalReport {
  double bleu = 0.0;
  std::vector<std::optional<double>> entity_accuracy;
  // Mean over examples with a defined accuracy; empty if there are none.
  std::optional<double> mean_entity_accuracy;
  std::size_t examples = 0;
};

// Entity accuracy against the first reference of each example.
EvalReport evaluate_predictions(const std::vector<Example>& examples,
                                const std::vector<std::string>& hypotheses);

}  // namespace gap
