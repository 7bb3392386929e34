// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gap/kg.hpp"
#include "gap/matrix.hpp"

namespace gap {

// Pre-softmax value of a blocked mask entry.
inline constexpr double kMaskBlocked = -1e9;

// Which neighbor kinds each query kind may attend to. Scheme names follow
// the usual notation M^{entity keys}_{relation keys}:
//   er_er = M^{e,r}_{e,r}, er_e = M^{e,r}_{e}, er_none = M^{e,r}_{}, e_e = M^{e}_{e}.
struct MaskScheme {
  bool entity_to_entities = true;
  bool entity_to_relations = true;
  bool relation_to_entities = true;
  bool relation_to_relations = true;

  static MaskScheme parse(std::string_view name);
  static const std::vector<std::string>& names();
  std::string name() const;

  friend bool operator==(const MaskScheme&, const MaskScheme&) = default;
};

// m_slots x m_slots with entries 0 (open) or kMaskBlocked. Slots at or past
// `active` are blocked in both row and column.
struct MaskMatrix {
  Matrix values;
  std::size_t active = 0;
  std::vector<bool> blocked_rows;

  std::size_t slots() const { return values.rows(); }
  bool open(std::size_t i, std::size_t j) const { return values(i, j) == 0.0; }
  // Leading active x active block.
  Matrix active_block() const;
};

// Connection types: 0 none, 1 entity-entity, 2 entity->relation,
// 3 relation->entity, 4 relation-relation. The diagonal is 0.
struct TypeMatrix {
  std::size_t slots = 0;
  std::vector<std::uint8_t> values;

  int at(std::size_t i, std::size_t j) const { return values[i * slots + j]; }
  std::uint8_t& at(std::size_t i, std::size_t j) { return values[i * slots + j]; }
  TypeMatrix active_block(std::size_t active) const;
};

inline constexpr int kTypeCount = 5;

// Throws SlotOverflow when the graph has more components than m_slots.
MaskMatrix build_mask(const ComponentTable& table, const MaskScheme& scheme, std::size_t m_slots);
MaskMatrix build_mask(const KnowledgeGraph& kg, const MaskScheme& scheme, std::size_t m_slots);
TypeMatrix build_type_matrix(const ComponentTable& table, std::size_t m_slots);
TypeMatrix build_type_matrix(const KnowledgeGraph& kg, std::size_t m_slots);

// Plain-text grids: a "rows cols" header line, then one line per row.
// Mask entries print as 0 (open) or 1 (blocked).
void write_grid(std::ostream& out, const MaskMatrix& mask);
void write_grid(std::ostream& out, const TypeMatrix& types);

}  // namespace gap
