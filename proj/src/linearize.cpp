// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/linearize.hpp"

#include "gap/error.hpp"
#include "gap/text.hpp"

namespace gap {

LinearizedGraph linearize(const KnowledgeGraph& kg, const ComponentTable& table,
                          const Vocabulary& vocab) {
  LinearizedGraph out;
  out.spans.resize(table.size());

  auto emit = [&](TokenId sep, std::size_t component) {
    out.token_ids.push_back(sep);
    const auto ids = vocab.encode_words(tokenize(table.components[component].label));
    if (ids.empty()) {
      throw Error(ErrorCode::TokenizationEmpty,
                  "label of component " + std::to_string(component) + " has no tokens");
    }
    const std::size_t start = out.token_ids.size();
    out.token_ids.insert(out.token_ids.end(), ids.begin(), ids.end());
    out.spans[component].push_back({start, out.token_ids.size()});
  };

  for (std::size_t t = 0; t < kg.triples.size(); ++t) {
    emit(special::kHeadSep, table.triple_head[t]);
    emit(special::kRelationSep, table.triple_relation[t]);
    emit(special::kTailSep, table.triple_tail[t]);
  }
  return out;
}

LinearizedGraph linearize(const KnowledgeGraph& kg, const Vocabulary& vocab) {
  return linearize(kg, component_index(kg), vocab);
}

}  // namespace gap
