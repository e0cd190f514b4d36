#include "ontograph/ontology.hpp"

#include <queue>

#include <json.hpp>

namespace ontograph {

std::vector<std::pair<std::size_t, std::size_t>> OntologySchema::slot_neighbors(std::size_t slot) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e].a == slot) out.emplace_back(edges[e].b, e);
        else if (edges[e].b == slot) out.emplace_back(edges[e].a, e);
    }
    return out;
}

bool OntologySchema::edge_type_allows(EdgeTypeId type, NodeTypeId ta, NodeTypeId tb) const {
    for (const SchemaEdge& e : edges) {
        if (e.type != type) continue;
        const NodeTypeId sa = slots[e.a].type, sb = slots[e.b].type;
        if ((sa == ta && sb == tb) || (sa == tb && sb == ta)) return true;
    }
    return false;
}

void OntologySchema::validate() const {
    if (slots.empty()) throw InputError("schema: no slots");
    for (std::size_t i = 0; i < slots.size(); ++i)
        if (slots[i].id != i) throw InputError("schema: slot ids must be dense 0..n-1 in order");
    if (target_slot >= slots.size()) throw InputError("schema: target slot out of range");
    for (const SchemaEdge& e : edges) {
        if (e.a >= slots.size() || e.b >= slots.size()) throw InputError("schema: edge references unknown slot");
        if (e.a == e.b) throw InputError("schema: self-loop pattern edge");
    }
    if (slots.size() > 1) {
        std::vector<bool> seen(slots.size(), false);
        std::queue<std::size_t> q;
        q.push(0);
        seen[0] = true;
        while (!q.empty()) {
            const std::size_t s = q.front();
            q.pop();
            for (auto [other, _] : slot_neighbors(s)) {
                if (!seen[other]) {
                    seen[other] = true;
                    q.push(other);
                }
            }
        }
        for (bool b : seen)
            if (!b) throw InputError("schema: pattern graph is not connected");
    }
}

void OntologySchema::bind(TypeVocab& node_types, TypeVocab& edge_types) {
    for (SchemaSlot& s : slots) s.type = node_types.add(s.type_name);
    for (SchemaEdge& e : edges) e.type = edge_types.add(e.type_name);
}

std::string OntologySchema::to_json() const {
    nlohmann::json j;
    j["slots"] = nlohmann::json::array();
    for (const SchemaSlot& s : slots) j["slots"].push_back({{"id", s.id}, {"type", s.type_name}});
    j["edges"] = nlohmann::json::array();
    for (const SchemaEdge& e : edges) j["edges"].push_back({{"a", e.a}, {"b", e.b}, {"type", e.type_name}});
    j["target"] = target_slot;
    return j.dump(2);
}

OntologySchema parse_schema_json(const std::string& text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw InputError(origin + ": invalid JSON: " + e.what());
    }
    OntologySchema s;
    try {
        for (const auto& js : j.at("slots")) {
            SchemaSlot slot;
            slot.id = js.at("id").get<std::size_t>();
            slot.type_name = js.at("type").get<std::string>();
            s.slots.push_back(std::move(slot));
        }
        for (const auto& je : j.value("edges", nlohmann::json::array())) {
            SchemaEdge e;
            e.a = je.at("a").get<std::size_t>();
            e.b = je.at("b").get<std::size_t>();
            e.type_name = je.at("type").get<std::string>();
            s.edges.push_back(std::move(e));
        }
        s.target_slot = j.at("target").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(origin + ": schema field error: " + e.what());
    }
    s.validate();
    return s;
}

} // namespace ontograph
