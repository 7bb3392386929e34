// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/trace.hpp"

#include <fstream>
#include <sstream>

#include "gap/error.hpp"

namespace gap {

AttentionTrace trace_attention(const Model& model, const GraphInputs& graph, const std::string& example_id) {
  if (!model.config().graph_attention) {
    throw Error(ErrorCode::InvalidConfig, "model has no graph-aware layers to trace");
  }
  Tape tape(false);
  EncoderTrace enc;
  encode(tape, model, graph, &enc);

  AttentionTrace t;
  t.example_id = example_id;
  for (const Component& c : graph.table.components) {
    t.labels.push_back(c.label);
    t.kinds.push_back(c.kind);
  }
  t.scheme = model.config().scheme.name();
  t.type_encoding = model.config().type_encoding;
  t.layers = std::move(enc.layers);
  t.blocked_rows = std::move(enc.blocked_rows);
  return t;
}

nlohmann::json to_json(const AttentionTrace& trace) {
  nlohmann::json j;
  j["example_id"] = trace.example_id;
  j["scheme"] = trace.scheme;
  j["type_encoding"] = trace.type_encoding;
  nlohmann::json comps = nlohmann::json::array();
  for (std::size_t i = 0; i < trace.labels.size(); ++i) {
    comps.push_back({{"label", trace.labels[i]},
                     {"kind", trace.kinds[i] == ComponentKind::Entity ? "entity" : "relation"}});
  }
  j["components"] = std::move(comps);
  j["blocked_rows"] = trace.blocked_rows;
  nlohmann::json layers = nlohmann::json::array();
  for (const Matrix& w : trace.layers) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < w.rows(); ++r) {
      auto row = w.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    layers.push_back(std::move(rows));
  }
  j["layers"] = std::move(layers);
  return j;
}

AttentionTrace trace_from_json(const nlohmann::json& j) {
  try {
    AttentionTrace t;
    t.example_id = j.at("example_id").get<std::string>();
    t.scheme = j.at("scheme").get<std::string>();
    t.type_encoding = j.at("type_encoding").get<bool>();
    for (const auto& c : j.at("components")) {
      t.labels.push_back(c.at("label").get<std::string>());
      const auto kind = c.at("kind").get<std::string>();
      if (kind != "entity" && kind != "relation") throw Error(ErrorCode::ParseError, "unknown kind " + kind);
      t.kinds.push_back(kind == "entity" ? ComponentKind::Entity : ComponentKind::Relation);
    }
    t.blocked_rows = j.at("blocked_rows").get<std::vector<bool>>();
    const std::size_t m = t.labels.size();
    for (const auto& layer : j.at("layers")) {
      if (layer.size() != m) throw Error(ErrorCode::ParseError, "layer row count does not match components");
      Matrix w(m, m);
      for (std::size_t r = 0; r < m; ++r) {
        const auto row = layer[r].get<std::vector<double>>();
        if (row.size() != m) throw Error(ErrorCode::ParseError, "layer column count does not match components");
        std::copy(row.begin(), row.end(), w.row(r).begin());
      }
      t.layers.push_back(std::move(w));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad trace: ") + e.what());
  }
}

void save_trace(const AttentionTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << to_json(trace).dump(1) << '\n';
}

AttentionTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("bad trace: ") + e.what());
  }
  return trace_from_json(j);
}

}  // namespace gap
