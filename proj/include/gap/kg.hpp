// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gap {

struct Entity {
  std::string id;
  std::string label;
};

struct Relation {
  std::string id;
  std::string label;
};

struct Triple {
  std::string head;
  std::string relation;
  std::string tail;
};

// Triple order is significant: it fixes the linearization order.
struct KnowledgeGraph {
  std::vector<Entity> entities;
  std::vector<Relation> relations;
  std::vector<Triple> triples;
};

// A graph paired with one or more reference texts.
struct Example {
  std::string id;
  KnowledgeGraph graph;
  std::vector<std::string> references;
};

struct SlotBudget {
  std::size_t num_nodes = 50;
  std::size_t num_relations = 60;

  std::size_t slots() const { return num_nodes + num_relations; }
};

// Checks ids, references, labels and slot budgets. Throws gap::Error with
// DanglingReference, EmptyGraph, SlotOverflow, DuplicateId,
// UnreferencedComponent or EmptyLabel.
KnowledgeGraph validate_graph(KnowledgeGraph kg, const SlotBudget& budget = {});

enum class ComponentKind { Entity, Relation };

struct Component {
  ComponentKind kind;
  std::string label;
  // Entity: index into KnowledgeGraph::entities. Relation: index of the
  // triple this edge occurrence belongs to.
  std::size_t source;
};

// Components 0..E-1 are entities in declaration order, E..E+R-1 are relation
// edge occurrences: one per triple, grouped by relation declaration order and
// then by triple order.
struct ComponentTable {
  std::vector<Component> components;
  std::size_t entity_count = 0;
  std::size_t relation_count = 0;
  // Per triple: component indices of head entity, relation occurrence, tail.
  std::vector<std::size_t> triple_head;
  std::vector<std::size_t> triple_relation;
  std::vector<std::size_t> triple_tail;

  std::size_t size() const { return components.size(); }
  bool is_entity(std::size_t i) const { return i < entity_count; }
};

ComponentTable component_index(const KnowledgeGraph& kg);

// Sorted index sets; a component is never its own neighbor.
struct Neighbors {
  std::vector<std::size_t> entity_neighbors;
  std::vector<std::size_t> relation_neighbors;
};

Neighbors neighbors(const ComponentTable& table, std::size_t i);
Neighbors neighbors(const KnowledgeGraph& kg, std::size_t i);

// Neighbor sets of every component, indexed by component.
std::vector<Neighbors> all_neighbors(const ComponentTable& table);

}  // namespace gap
