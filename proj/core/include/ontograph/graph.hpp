#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ontograph/errors.hpp"

namespace ontograph {

using NodeId = std::uint32_t;
using NodeTypeId = std::uint16_t;
using EdgeTypeId = std::uint16_t;
using EdgeId = std::uint32_t;

/// Dense vocabulary of type names. Ids are assigned in registration order.
class TypeVocab {
public:
    NodeTypeId add(const std::string& name) {
        auto it = index_.find(name);
        if (it != index_.end()) return it->second;
        names_.push_back(name);
        const auto id = static_cast<NodeTypeId>(names_.size() - 1);
        index_.emplace(name, id);
        return id;
    }
    std::optional<NodeTypeId> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    const std::string& name(std::size_t id) const { return names_.at(id); }
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeTypeId> index_;
};

struct Edge {
    NodeId u;
    NodeId v;
    EdgeTypeId type;
};

struct AdjEntry {
    NodeId neighbor;
    EdgeTypeId type;
    EdgeId edge;
};

/// Typed undirected heterogeneous graph, immutable after finalize(). Node ids
/// are dense 0..N-1; original ids live in node_name. Features, when present,
/// are row-major N x feature_dim.
class HeteroGraph {
public:
    TypeVocab node_types;
    TypeVocab edge_types;

    std::vector<NodeTypeId> node_type;
    std::vector<std::string> node_name;
    std::unordered_map<std::string, NodeId> name_to_id;

    std::vector<Edge> edges; // canonical u < v, sorted by (u, v, type)

    std::size_t feature_dim = 0;
    std::vector<double> features; // empty when the dataset is featureless

    std::size_t edge_feature_dim = 0;
    std::vector<double> edge_features; // optional, row per edge

    std::size_t num_nodes() const { return node_type.size(); }
    std::size_t num_edges() const { return edges.size(); }
    bool has_features() const { return !features.empty(); }

    NodeId add_node(const std::string& name, NodeTypeId type);
    /// Adds an undirected edge; duplicate (pair, type) rows collapse.
    void add_edge(NodeId u, NodeId v, EdgeTypeId type);

    /// Sorts edges, builds the per-node adjacency index (grouped by edge
    /// type, ascending neighbor within each group) and freezes the graph.
    void finalize();

    /// Incident (neighbor, type) entries of `node`, optionally restricted to
    /// one edge type. Order: ascending (edge type, neighbor id).
    std::vector<AdjEntry> neighbors(NodeId node, std::optional<EdgeTypeId> type = std::nullopt) const;

    /// All nodes of one type, ascending.
    const std::vector<NodeId>& nodes_of_type(NodeTypeId t) const { return by_type_.at(t); }

    bool has_edge(NodeId u, NodeId v) const;
    bool has_edge(NodeId u, NodeId v, EdgeTypeId type) const;

    const double* feature_row(NodeId v) const { return features.data() + v * feature_dim; }

private:
    bool finalized_ = false;
    std::vector<std::uint32_t> adj_offset_; // N + 1
    std::vector<AdjEntry> adj_;
    std::vector<std::vector<NodeId>> by_type_;
};

struct DegreeStats {
    std::vector<std::pair<std::string, std::size_t>> nodes_per_type;
    std::vector<std::pair<std::string, std::size_t>> edges_per_type;
    std::size_t total_nodes = 0;
    std::size_t total_edges = 0;
};

DegreeStats degree_stats(const HeteroGraph& g);

enum class TaskKind { NodeClassification, LinkPrediction };

struct EdgeRef {
    NodeId u;
    NodeId v;
    EdgeTypeId type;
};

/// Train/val/test membership plus labels. Label reads are counted so tests
/// can assert that unsupervised runs never touch them.
class LabeledSplit {
public:
    TaskKind task = TaskKind::NodeClassification;

    // node classification
    std::vector<NodeId> train, val, test;
    int num_classes = 0;

    // link prediction
    std::vector<EdgeRef> train_edges, val_edges, test_edges;
    std::vector<EdgeRef> val_negatives, test_negatives;

    void set_labels(std::vector<int> labels) { labels_ = std::move(labels); }
    bool has_labels() const { return !labels_.empty(); }

    /// Class of node v (-1 if unlabeled). Counted.
    int label_of(NodeId v) const {
        ++label_reads_;
        return v < labels_.size() ? labels_[v] : -1;
    }
    std::uint64_t label_read_count() const { return label_reads_; }

    void validate(std::size_t num_nodes) const;

private:
    std::vector<int> labels_; // size N or empty, -1 = unlabeled
    mutable std::uint64_t label_reads_ = 0;
};

} // namespace ontograph
