#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ontograph/graph.hpp"

namespace ontograph {

struct SchemaSlot {
    std::size_t id = 0;
    std::string type_name;
    NodeTypeId type = 0;
};

struct SchemaEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    std::string type_name;
    EdgeTypeId type = 0;
};

/// The ontology pattern: a small connected typed graph whose instances in the
/// HIN are the ontology subgraphs. Also serves as the dataset's type
/// declaration (every node/edge type must appear here).
struct OntologySchema {
    std::vector<SchemaSlot> slots; // dense by slot id
    std::vector<SchemaEdge> edges;
    std::size_t target_slot = 0;

    std::size_t slot_count() const { return slots.size(); }
    NodeTypeId target_type() const { return slots[target_slot].type; }

    /// Pattern edges incident to `slot` as (other slot, edge index) pairs.
    std::vector<std::pair<std::size_t, std::size_t>> slot_neighbors(std::size_t slot) const;

    /// True when the declared endpoint types of `type` admit the unordered
    /// pair (ta, tb).
    bool edge_type_allows(EdgeTypeId type, NodeTypeId ta, NodeTypeId tb) const;

    /// Checks connectivity, dense slot ids, and target existence.
    void validate() const;

    /// Registers all slot/edge type names into the vocabularies and resolves
    /// numeric ids. Must be called before the schema is used with a graph.
    void bind(TypeVocab& node_types, TypeVocab& edge_types);

    std::string to_json() const;
};

OntologySchema parse_schema_json(const std::string& text, const std::string& origin);

} // namespace ontograph
