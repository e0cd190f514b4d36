#include "ontograph/graph.hpp"

#include <algorithm>
#include <unordered_set>

namespace ontograph {

NodeId HeteroGraph::add_node(const std::string& name, NodeTypeId type) {
    if (finalized_) throw InputError("graph: add_node after finalize");
    if (name_to_id.count(name)) throw InputError("graph: duplicate node id '" + name + "'");
    const auto id = static_cast<NodeId>(node_type.size());
    node_type.push_back(type);
    node_name.push_back(name);
    name_to_id.emplace(name, id);
    return id;
}

void HeteroGraph::add_edge(NodeId u, NodeId v, EdgeTypeId type) {
    if (finalized_) throw InputError("graph: add_edge after finalize");
    if (u == v) throw InputError("graph: self-loop on node '" + node_name.at(u) + "'");
    if (u >= num_nodes() || v >= num_nodes()) throw InputError("graph: edge endpoint out of range");
    if (u > v) std::swap(u, v);
    edges.push_back({u, v, type});
}

void HeteroGraph::finalize() {
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        if (a.u != b.u) return a.u < b.u;
        if (a.v != b.v) return a.v < b.v;
        return a.type < b.type;
    });
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](const Edge& a, const Edge& b) {
                                return a.u == b.u && a.v == b.v && a.type == b.type;
                            }),
                edges.end());

    const std::size_t n = num_nodes();
    std::vector<std::vector<AdjEntry>> tmp(n);
    for (EdgeId e = 0; e < edges.size(); ++e) {
        tmp[edges[e].u].push_back({edges[e].v, edges[e].type, e});
        tmp[edges[e].v].push_back({edges[e].u, edges[e].type, e});
    }
    adj_offset_.assign(n + 1, 0);
    adj_.clear();
    adj_.reserve(edges.size() * 2);
    for (std::size_t i = 0; i < n; ++i) {
        auto& lst = tmp[i];
        std::sort(lst.begin(), lst.end(), [](const AdjEntry& a, const AdjEntry& b) {
            if (a.type != b.type) return a.type < b.type;
            return a.neighbor < b.neighbor;
        });
        adj_offset_[i + 1] = adj_offset_[i] + static_cast<std::uint32_t>(lst.size());
        adj_.insert(adj_.end(), lst.begin(), lst.end());
    }

    by_type_.assign(node_types.size(), {});
    for (NodeId v = 0; v < n; ++v) by_type_[node_type[v]].push_back(v);

    finalized_ = true;
}

std::vector<AdjEntry> HeteroGraph::neighbors(NodeId node, std::optional<EdgeTypeId> type) const {
    if (node >= num_nodes()) throw InputError("neighbors: node id out of range");
    std::vector<AdjEntry> out;
    for (std::uint32_t i = adj_offset_[node]; i < adj_offset_[node + 1]; ++i) {
        if (type && adj_[i].type != *type) continue;
        out.push_back(adj_[i]);
    }
    return out;
}

bool HeteroGraph::has_edge(NodeId u, NodeId v) const {
    if (u == v) return false;
    if (u > v) std::swap(u, v);
    // adjacency of the lower-degree endpoint would be faster; n is small here
    for (std::uint32_t i = adj_offset_[u]; i < adj_offset_[u + 1]; ++i)
        if (adj_[i].neighbor == v) return true;
    return false;
}

bool HeteroGraph::has_edge(NodeId u, NodeId v, EdgeTypeId type) const {
    if (u == v) return false;
    for (std::uint32_t i = adj_offset_[u]; i < adj_offset_[u + 1]; ++i)
        if (adj_[i].neighbor == v && adj_[i].type == type) return true;
    return false;
}

DegreeStats degree_stats(const HeteroGraph& g) {
    DegreeStats s;
    s.total_nodes = g.num_nodes();
    s.total_edges = g.num_edges();
    std::vector<std::size_t> nc(g.node_types.size(), 0);
    std::vector<std::size_t> ec(g.edge_types.size(), 0);
    for (NodeTypeId t : g.node_type) ++nc[t];
    for (const Edge& e : g.edges) ++ec[e.type];
    for (std::size_t t = 0; t < nc.size(); ++t) s.nodes_per_type.emplace_back(g.node_types.name(t), nc[t]);
    for (std::size_t t = 0; t < ec.size(); ++t) s.edges_per_type.emplace_back(g.edge_types.name(t), ec[t]);
    return s;
}

void LabeledSplit::validate(std::size_t num_nodes) const {
    auto check_nodes = [&](const std::vector<NodeId>& ids, const char* which) {
        for (NodeId v : ids)
            if (v >= num_nodes) throw InputError(std::string("split: ") + which + " node out of range");
    };
    check_nodes(train, "train");
    check_nodes(val, "val");
    check_nodes(test, "test");
    std::unordered_set<NodeId> seen;
    for (const auto* part : {&train, &val, &test})
        for (NodeId v : *part)
            if (!seen.insert(v).second) throw InputError("split: train/val/test sets overlap");
    if (task == TaskKind::NodeClassification) {
        for (const auto* part : {&train, &val, &test})
            for (NodeId v : *part) {
                if (v >= labels_.size() || labels_[v] < 0)
                    throw InputError("split: node '" + std::to_string(v) + "' in split has no label");
                if (labels_[v] >= num_classes) throw InputError("split: label exceeds class count");
            }
    }
}

} // namespace ontograph
