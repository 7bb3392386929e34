// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/topology.hpp"

#include <algorithm>
#include <ostream>

#include "gap/error.hpp"

namespace gap {

namespace {

void check_slots(const ComponentTable& table, std::size_t m_slots) {
  if (table.size() > m_slots) {
    throw Error(ErrorCode::SlotOverflow, std::to_string(table.size()) +
                                             " components exceed " + std::to_string(m_slots) +
                                             " slots");
  }
}

}  // namespace

MaskScheme MaskScheme::parse(std::string_view name) {
  if (name == "er_er") return {true, true, true, true};
  if (name == "er_e") return {true, true, true, false};
  if (name == "er_none") return {true, true, false, false};
  if (name == "e_e") return {true, false, true, false};
  throw Error(ErrorCode::InvalidConfig, "unknown mask scheme '" + std::string(name) + "'");
}

const std::vector<std::string>& MaskScheme::names() {
  static const std::vector<std::string> kNames = {"er_e", "er_none", "e_e", "er_er"};
  return kNames;
}

std::string MaskScheme::name() const {
  auto part = [](bool e, bool r) -> std::string {
    if (e && r) return "er";
    if (e) return "e";
    if (r) return "r";
    return "none";
  };
  return part(entity_to_entities, entity_to_relations) + "_" +
         part(relation_to_entities, relation_to_relations);
}

Matrix MaskMatrix::active_block() const {
  Matrix out(active, active);
  for (std::size_t i = 0; i < active; ++i) {
    for (std::size_t j = 0; j < active; ++j) out(i, j) = values(i, j);
  }
  return out;
}

TypeMatrix TypeMatrix::active_block(std::size_t active) const {
  TypeMatrix out{active, std::vector<std::uint8_t>(active * active, 0)};
  for (std::size_t i = 0; i < active; ++i) {
    for (std::size_t j = 0; j < active; ++j) out.at(i, j) = static_cast<std::uint8_t>(at(i, j));
  }
  return out;
}

MaskMatrix build_mask(const ComponentTable& table, const MaskScheme& scheme, std::size_t m_slots) {
  check_slots(table, m_slots);
  MaskMatrix mask;
  mask.values = Matrix(m_slots, m_slots, kMaskBlocked);
  mask.active = table.size();
  mask.blocked_rows.assign(m_slots, true);

  const auto nbrs = all_neighbors(table);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const bool entity = table.is_entity(i);
    const bool want_entities = entity ? scheme.entity_to_entities : scheme.relation_to_entities;
    const bool want_relations = entity ? scheme.entity_to_relations : scheme.relation_to_relations;
    bool any = false;
    if (want_entities) {
      for (std::size_t j : nbrs[i].entity_neighbors) mask.values(i, j) = 0.0, any = true;
    }
    if (want_relations) {
      for (std::size_t j : nbrs[i].relation_neighbors) mask.values(i, j) = 0.0, any = true;
    }
    if (any) {
      mask.values(i, i) = 0.0;
      mask.blocked_rows[i] = false;
    }
  }
  return mask;
}

MaskMatrix build_mask(const KnowledgeGraph& kg, const MaskScheme& scheme, std::size_t m_slots) {
  return build_mask(component_index(kg), scheme, m_slots);
}

TypeMatrix build_type_matrix(const ComponentTable& table, std::size_t m_slots) {
  check_slots(table, m_slots);
  TypeMatrix types{m_slots, std::vector<std::uint8_t>(m_slots * m_slots, 0)};
  const auto nbrs = all_neighbors(table);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const bool entity = table.is_entity(i);
    for (std::size_t j : nbrs[i].entity_neighbors) types.at(i, j) = entity ? 1 : 3;
    for (std::size_t j : nbrs[i].relation_neighbors) types.at(i, j) = entity ? 2 : 4;
  }
  return types;
}

TypeMatrix build_type_matrix(const KnowledgeGraph& kg, std::size_t m_slots) {
  return build_type_matrix(component_index(kg), m_slots);
}

void write_grid(std::ostream& out, const MaskMatrix& mask) {
  out << mask.slots() << ' ' << mask.slots() << '\n';
  for (std::size_t i = 0; i < mask.slots(); ++i) {
    for (std::size_t j = 0; j < mask.slots(); ++j) {
      out << (j ? " " : "") << (mask.open(i, j) ? 0 : 1);
    }
    out << '\n';
  }
}

void write_grid(std::ostream& out, const TypeMatrix& types) {
  out << types.slots << ' ' << types.slots << '\n';
  for (std::size_t i = 0; i < types.slots; ++i) {
    for (std::size_t j = 0; j < types.slots; ++j) out << (j ? " " : "") << types.at(i, j);
    out << '\n';
  }
}

}  // namespace gap
