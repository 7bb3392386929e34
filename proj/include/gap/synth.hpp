// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gap/kg.hpp"

namespace gap {

struct SynthOptions {
  std::size_t count = 50;
  std::size_t min_triples = 1;
  std::size_t max_triples = 3;  // at most 9
  std::uint64_t seed = 7;
};

// Small biography-style graphs with templated reference sentences, one
// sentence per triple in triple order. Deterministic for a given seed.
std::vector<Example> synthetic_corpus(const SynthOptions& options = {});

}  // namespace gap
