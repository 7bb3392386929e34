// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gap/matrix.hpp"
#include "gap/model.hpp"

namespace gap {

// Graph attention of one example: per graph-aware layer the head-averaged
// post-softmax weights over the live components. Blocked rows are all zero.
struct AttentionTrace {
  std::string example_id;
  std::vector<std::string> labels;
  std::vector<ComponentKind> kinds;
  std::string scheme;
  bool type_encoding = false;
  std::vector<Matrix> layers;
  std::vector<bool> blocked_rows;
};

AttentionTrace trace_attention(const Model& model, const GraphInputs& graph, const std::string& example_id);

nlohmann::json to_json(const AttentionTrace& trace);
// Throws ParseError.
AttentionTrace trace_from_json(const nlohmann::json& j);

void save_trace(const AttentionTrace& trace, const std::filesystem::path& path);
AttentionTrace load_trace(const std::filesystem::path& path);

}  // namespace gap
