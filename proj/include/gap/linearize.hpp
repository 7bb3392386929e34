// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "gap/kg.hpp"
#include "gap/vocab.hpp"

namespace gap {

// Half-open token range [start, end).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const Span&, const Span&) = default;
};

struct LinearizedGraph {
  std::vector<TokenId> token_ids;
  // Indexed by component index (see ComponentTable); one span per occurrence.
  std::vector<std::vector<Span>> spans;

  std::size_t size() const { return token_ids.size(); }
  std::size_t component_count() const { return spans.size(); }
};

// Emits <H> head <R> relation <T> tail for every triple in input order.
// Separator tokens belong to no span. Throws TokenizationEmpty if a label has
// no tokens.
LinearizedGraph linearize(const KnowledgeGraph& kg, const ComponentTable& table,
                          const Vocabulary& vocab);
LinearizedGraph linearize(const KnowledgeGraph& kg, const Vocabulary& vocab);

}  // namespace gap
