#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "ontograph/graph.hpp"
#include "ontograph/ontology.hpp"

namespace ontograph {

/// One matched instance of the ontology pattern: an injective, type- and
/// edge-respecting assignment of graph nodes to pattern slots.
struct OntoSubgraph {
    std::vector<NodeId> assignment; // slot id -> graph node
    NodeId anchor = 0;              // node at the schema's target slot
};

/// Slot-ordered node ids, 4 bytes each, big endian so that lexicographic key
/// order equals tuple order. Equal assignments <=> equal keys.
using CanonicalKey = std::string;

CanonicalKey canonical_key(const std::vector<NodeId>& assignment);
inline CanonicalKey canonical_key(const OntoSubgraph& o) { return canonical_key(o.assignment); }

using KeyIndex = std::unordered_set<CanonicalKey>;

/// All instances of `schema` whose target slot is `anchor`, found by a
/// backtracking matcher that orders slots by ascending candidate-set size.
/// When more than `cap` instances exist, a uniform random sample of size
/// `cap` is returned (reservoir, seeded). Output is sorted by canonical key.
/// `total_found`, when given, receives the unsampled instance count.
std::vector<OntoSubgraph> enumerate_subgraphs(const HeteroGraph& g, const OntologySchema& schema,
                                              NodeId anchor, std::size_t cap, std::uint64_t seed,
                                              std::size_t* total_found = nullptr);

struct Substitution {
    std::size_t slot;
    NodeId original;
    NodeId replacement;
};

/// Hard negative: the base instance with some non-anchor slots re-assigned to
/// other nodes of the same type. Pattern topology is kept; the substituted
/// "edges" need not exist in the HIN.
struct PerturbedSubgraph {
    OntoSubgraph base;
    std::vector<Substitution> substitutions;
    std::vector<NodeId> assignment; // perturbed slot -> node
};

/// Draws a perturbation of `base` whose canonical key is absent from
/// `positive_index`. Each attempt picks `n_swap` distinct non-anchor slots
/// and fresh same-type replacements; attempts that collide with a positive
/// key, repeat an earlier draw, or find no candidate count against
/// `max_retries`. Returns nullopt when exhausted.
std::optional<PerturbedSubgraph> perturb(const OntoSubgraph& base, const HeteroGraph& g,
                                         const OntologySchema& schema, const KeyIndex& positive_index,
                                         std::size_t n_swap, std::size_t max_retries, std::uint64_t seed);

/// One shuffled training sample; negatives carry per-slot substitution flags.
struct SubgraphSample {
    std::vector<NodeId> assignment;
    std::vector<std::uint8_t> substituted; // per slot, 1 = node was swapped in
    NodeId anchor = 0;
    bool positive = true;
};

/// Interleaves positives with round(ratio * |positives|) negatives (all of
/// them when fewer are available) and applies a seeded Fisher-Yates shuffle.
std::vector<SubgraphSample> build_batches(const std::vector<OntoSubgraph>& positives,
                                          const std::vector<PerturbedSubgraph>& negatives,
                                          double ratio, std::uint64_t seed);

/// Everything the trainer needs about the positive set: instances for every
/// target-type anchor, the key index, and per-node membership lists.
struct SubgraphIndex {
    std::vector<OntoSubgraph> instances; // grouped by anchor, key-sorted within
    KeyIndex positive_keys;
    std::vector<NodeId> anchors;                          // target-type nodes
    std::vector<std::vector<std::size_t>> by_anchor;      // anchor order above
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> memberships; // node -> (instance, slot)
    std::size_t capped_anchors = 0;
    std::size_t total_instances = 0; // before capping
};

SubgraphIndex build_subgraph_index(const HeteroGraph& g, const OntologySchema& schema, std::size_t cap,
                                   std::uint64_t seed, std::size_t threads = 1);

} // namespace ontograph
