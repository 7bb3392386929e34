// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/kg.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "gap/error.hpp"
#include "gap/text.hpp"

namespace gap {

namespace {

template <typename Item>
std::unordered_map<std::string, std::size_t> index_ids(const std::vector<Item>& items,
                                                       const char* what) {
  std::unordered_map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!ids.emplace(items[i].id, i).second) {
      throw Error(ErrorCode::DuplicateId, std::string(what) + " id '" + items[i].id + "'");
    }
    if (tokenize(items[i].label).empty()) {
      throw Error(ErrorCode::EmptyLabel, std::string(what) + " '" + items[i].id + "'");
    }
  }
  return ids;
}

std::size_t lookup(const std::unordered_map<std::string, std::size_t>& ids,
                   const std::string& id, std::size_t triple, const char* what) {
  auto it = ids.find(id);
  if (it == ids.end()) {
    throw Error(ErrorCode::DanglingReference, "triple " + std::to_string(triple) +
                                                  " cites undeclared " + what + " '" + id + "'");
  }
  return it->second;
}

}  // namespace

KnowledgeGraph validate_graph(KnowledgeGraph kg, const SlotBudget& budget) {
  const auto entity_ids = index_ids(kg.entities, "entity");
  const auto relation_ids = index_ids(kg.relations, "relation");

  std::vector<bool> entity_used(kg.entities.size(), false);
  std::vector<bool> relation_used(kg.relations.size(), false);
  for (std::size_t t = 0; t < kg.triples.size(); ++t) {
    const Triple& tr = kg.triples[t];
    entity_used[lookup(entity_ids, tr.head, t, "entity")] = true;
    relation_used[lookup(relation_ids, tr.relation, t, "relation")] = true;
    entity_used[lookup(entity_ids, tr.tail, t, "entity")] = true;
  }
  if (kg.triples.empty()) {
    throw Error(ErrorCode::EmptyGraph, "graph has no triples");
  }
  if (kg.entities.size() > budget.num_nodes) {
    throw Error(ErrorCode::SlotOverflow, std::to_string(kg.entities.size()) +
                                             " entities exceed the node budget of " +
                                             std::to_string(budget.num_nodes));
  }
  // Every triple is its own relation component.
  if (kg.triples.size() > budget.num_relations) {
    throw Error(ErrorCode::SlotOverflow, std::to_string(kg.triples.size()) +
                                             " relation occurrences exceed the budget of " +
                                             std::to_string(budget.num_relations));
  }
  for (std::size_t i = 0; i < kg.entities.size(); ++i) {
    if (!entity_used[i]) {
      throw Error(ErrorCode::UnreferencedComponent, "entity '" + kg.entities[i].id + "'");
    }
  }
  for (std::size_t i = 0; i < kg.relations.size(); ++i) {
    if (!relation_used[i]) {
      throw Error(ErrorCode::UnreferencedComponent, "relation '" + kg.relations[i].id + "'");
    }
  }
  return kg;
}

ComponentTable component_index(const KnowledgeGraph& kg) {
  std::unordered_map<std::string, std::size_t> entity_ids;
  std::unordered_map<std::string, std::size_t> relation_ids;
  for (std::size_t i = 0; i < kg.entities.size(); ++i) entity_ids.emplace(kg.entities[i].id, i);
  for (std::size_t i = 0; i < kg.relations.size(); ++i) relation_ids.emplace(kg.relations[i].id, i);

  ComponentTable table;
  table.entity_count = kg.entities.size();
  for (std::size_t i = 0; i < kg.entities.size(); ++i) {
    table.components.push_back({ComponentKind::Entity, kg.entities[i].label, i});
  }

  const std::size_t n = kg.triples.size();
  table.triple_head.resize(n);
  table.triple_relation.resize(n);
  table.triple_tail.resize(n);
  std::vector<std::vector<std::size_t>> occurrences(kg.relations.size());
  for (std::size_t t = 0; t < n; ++t) {
    const Triple& tr = kg.triples[t];
    auto head = entity_ids.find(tr.head);
    auto tail = entity_ids.find(tr.tail);
    auto rel = relation_ids.find(tr.relation);
    if (head == entity_ids.end() || tail == entity_ids.end() || rel == relation_ids.end()) {
      throw Error(ErrorCode::DanglingReference, "triple " + std::to_string(t));
    }
    table.triple_head[t] = head->second;
    table.triple_tail[t] = tail->second;
    occurrences[rel->second].push_back(t);
  }
  for (std::size_t r = 0; r < kg.relations.size(); ++r) {
    for (std::size_t t : occurrences[r]) {
      table.triple_relation[t] = table.components.size();
      table.components.push_back({ComponentKind::Relation, kg.relations[r].label, t});
    }
  }
  table.relation_count = table.components.size() - table.entity_count;
  return table;
}

Neighbors neighbors(const ComponentTable& table, std::size_t i) {
  if (i >= table.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "component " + std::to_string(i) + " of " +
                                                std::to_string(table.size()));
  }
  std::set<std::size_t> ents;
  std::set<std::size_t> rels;
  const std::size_t n = table.triple_head.size();
  if (table.is_entity(i)) {
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t h = table.triple_head[t];
      const std::size_t tl = table.triple_tail[t];
      if (h != i && tl != i) continue;
      rels.insert(table.triple_relation[t]);
      if (h != i) ents.insert(h);
      if (tl != i) ents.insert(tl);
    }
  } else {
    const std::size_t own = table.components[i].source;
    const std::size_t h = table.triple_head[own];
    const std::size_t tl = table.triple_tail[own];
    ents.insert(h);
    ents.insert(tl);
    for (std::size_t t = 0; t < n; ++t) {
      if (t == own) continue;
      const std::size_t oh = table.triple_head[t];
      const std::size_t ot = table.triple_tail[t];
      if (oh == h || oh == tl || ot == h || ot == tl) rels.insert(table.triple_relation[t]);
    }
  }
  return {{ents.begin(), ents.end()}, {rels.begin(), rels.end()}};
}

Neighbors neighbors(const KnowledgeGraph& kg, std::size_t i) {
  return neighbors(component_index(kg), i);
}

std::vector<Neighbors> all_neighbors(const ComponentTable& table) {
  std::vector<Neighbors> out;
  out.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) out.push_back(neighbors(table, i));
  return out;
}

}  // namespace gap
