#pragma once

#include <string>

#include "ontograph/graph.hpp"
#include "ontograph/ontology.hpp"

namespace ontograph {

struct Dataset {
    HeteroGraph graph;
    OntologySchema schema;
    LabeledSplit split;
};

/// Loads a dataset directory:
///   schema.json   (required)  ontology pattern + the type declarations
///   nodes.tsv     (required)  node_id<TAB>type_name
///   edges.tsv     (required)  src<TAB>dst<TAB>edge_type_name
///   features.bin  (optional)  [u64 N][u64 d_n] then N*d_n f32, node order
///   labels.tsv    (optional)  node_id<TAB>class_index
///   split.json    (optional)  {"task":"nc","train":[...],"val":[...],"test":[...]}
///                             or "lp" with [src,dst,type] triples
/// Node ids may be arbitrary strings; they are remapped to dense 0-based ids
/// in nodes.tsv line order. Edges are stored undirected; directed input rows
/// are symmetrized and duplicate rows collapse. Malformed input raises
/// InputError with file and line.
Dataset load_dataset(const std::string& dir);

/// Inverse of load_dataset; writes every file the dataset carries.
void write_dataset(const std::string& dir, const Dataset& ds);

} // namespace ontograph
