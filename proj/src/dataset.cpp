// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/dataset.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gap/error.hpp"

namespace gap {

using nlohmann::json;

namespace {

Example parse_record(const std::string& line, std::size_t line_no, const SlotBudget& budget) {
  Example ex;
  try {
    const json j = json::parse(line);
    ex.id = j.value("id", std::to_string(line_no));
    for (const auto& e : j.at("entities")) {
      ex.graph.entities.push_back({e.at("id").get<std::string>(), e.at("label").get<std::string>()});
    }
    for (const auto& r : j.at("relations")) {
      ex.graph.relations.push_back({r.at("id").get<std::string>(), r.at("label").get<std::string>()});
    }
    for (const auto& t : j.at("triples")) {
      if (!t.is_array() || t.size() != 3) throw LineError(ErrorCode::ParseError, line_no, "triple must have 3 ids");
      ex.graph.triples.push_back({t[0].get<std::string>(), t[1].get<std::string>(), t[2].get<std::string>()});
    }
    for (const auto& r : j.at("references")) ex.references.push_back(r.get<std::string>());
  } catch (const LineError&) {
    throw;
  } catch (const json::exception& e) {
    throw LineError(ErrorCode::ParseError, line_no, e.what());
  }
  if (ex.references.empty()) throw LineError(ErrorCode::ValidationError, line_no, "record has no reference");
  try {
    ex.graph = validate_graph(std::move(ex.graph), budget);
  } catch (const Error& e) {
    throw LineError(ErrorCode::ValidationError, line_no, e.what());
  }
  return ex;
}

}  // namespace

std::vector<Example> parse_dataset(const std::string& text, const SlotBudget& budget) {
  std::vector<Example> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_record(line, line_no, budget));
  }
  return out;
}

std::vector<Example> load_dataset(const std::filesystem::path& path, const SlotBudget& budget) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str(), budget);
}

std::string example_to_json_line(const Example& ex) {
  json j;
  j["id"] = ex.id;
  j["entities"] = json::array();
  for (const auto& e : ex.graph.entities) j["entities"].push_back({{"id", e.id}, {"label", e.label}});
  j["relations"] = json::array();
  for (const auto& r : ex.graph.relations) j["relations"].push_back({{"id", r.id}, {"label", r.label}});
  j["triples"] = json::array();
  for (const auto& t : ex.graph.triples) j["triples"].push_back({t.head, t.relation, t.tail});
  j["references"] = ex.references;
  return j.dump();
}

void save_dataset(const std::filesystem::path& path, const std::vector<Example>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  for (const auto& ex : examples) out << example_to_json_line(ex) << '\n';
}

}  // namespace gap
