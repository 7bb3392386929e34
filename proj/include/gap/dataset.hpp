// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gap/kg.hpp"

namespace gap {

// One JSON object per line:
//   {"id": "...", "entities": [{"id": "...", "label": "..."}],
//    "relations": [{"id": "...", "label": "..."}],
//    "triples": [["head_id", "relation_id", "tail_id"]], "references": ["..."]}
// Blank lines are skipped. Malformed JSON or schema violations raise
// LineError(ParseError); graphs that fail validation or records without a
// reference raise LineError(ValidationError).
std::vector<Example> load_dataset(const std::filesystem::path& path, const SlotBudget& budget = {});
std::vector<Example> parse_dataset(const std::string& text, const SlotBudget& budget = {});

std::string example_to_json_line(const Example& example);
void save_dataset(const std::filesystem::path& path, const std::vector<Example>& examples);

}  // namespace gap
