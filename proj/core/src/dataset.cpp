#include "ontograph/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace ontograph {

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError(p.string() + ": missing file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TsvRow {
    std::size_t line_no;
    std::vector<std::string> fields;
};

std::vector<TsvRow> read_tsv(const fs::path& p, std::size_t expect_fields) {
    std::ifstream in(p);
    if (!in) throw InputError(p.string() + ": missing file");
    std::vector<TsvRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        TsvRow row{line_no, {}};
        std::size_t pos = 0;
        while (true) {
            const std::size_t tab = line.find('\t', pos);
            if (tab == std::string::npos) {
                row.fields.push_back(line.substr(pos));
                break;
            }
            row.fields.push_back(line.substr(pos, tab - pos));
            pos = tab + 1;
        }
        if (row.fields.size() != expect_fields)
            throw InputError(p.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(expect_fields) + " tab-separated fields, got " +
                             std::to_string(row.fields.size()));
        rows.push_back(std::move(row));
    }
    return rows;
}

NodeId lookup_node(const HeteroGraph& g, const std::string& name, const fs::path& file, std::size_t line) {
    auto it = g.name_to_id.find(name);
    if (it == g.name_to_id.end())
        throw InputError(file.string() + ":" + std::to_string(line) + ": unknown node id '" + name + "'");
    return it->second;
}

void load_features(const fs::path& p, HeteroGraph& g) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return; // optional
    std::uint64_t n = 0, d = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&d), 8);
    if (!in) throw InputError(p.string() + ": truncated header");
    if (n != g.num_nodes())
        throw InputError(p.string() + ": header declares " + std::to_string(n) + " nodes, dataset has " +
                         std::to_string(g.num_nodes()));
    std::vector<float> raw(static_cast<std::size_t>(n) * d);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)));
    if (!in) throw InputError(p.string() + ": truncated feature payload");
    g.feature_dim = static_cast<std::size_t>(d);
    g.features.assign(raw.begin(), raw.end()); // f32 storage, f64 in memory
}

void load_labels(const fs::path& p, const HeteroGraph& g, LabeledSplit& split) {
    if (!fs::exists(p)) return;
    std::vector<int> labels(g.num_nodes(), -1);
    int max_class = -1;
    for (const TsvRow& row : read_tsv(p, 2)) {
        const NodeId v = lookup_node(g, row.fields[0], p, row.line_no);
        int cls = 0;
        try {
            cls = std::stoi(row.fields[1]);
        } catch (...) {
            throw InputError(p.string() + ":" + std::to_string(row.line_no) + ": bad class index '" +
                             row.fields[1] + "'");
        }
        if (cls < 0) throw InputError(p.string() + ":" + std::to_string(row.line_no) + ": negative class index");
        if (labels[v] != -1)
            throw InputError(p.string() + ":" + std::to_string(row.line_no) + ": duplicate label for '" +
                             row.fields[0] + "'");
        labels[v] = cls;
        max_class = std::max(max_class, cls);
    }
    split.num_classes = max_class + 1;
    split.set_labels(std::move(labels));
}

EdgeRef parse_edge_ref(const nlohmann::json& je, const HeteroGraph& g, const fs::path& p) {
    if (!je.is_array() || je.size() < 2)
        throw InputError(p.string() + ": link-prediction split entries must be [src, dst] or [src, dst, type]");
    const NodeId u = lookup_node(g, je.at(0).get<std::string>(), p, 0);
    const NodeId v = lookup_node(g, je.at(1).get<std::string>(), p, 0);
    EdgeTypeId t = 0;
    if (je.size() >= 3) {
        auto id = g.edge_types.find(je.at(2).get<std::string>());
        if (!id) throw InputError(p.string() + ": unknown edge type '" + je.at(2).get<std::string>() + "'");
        t = *id;
    }
    return {u, v, t};
}

void load_split(const fs::path& p, const HeteroGraph& g, LabeledSplit& split) {
    if (!fs::exists(p)) {
        split.task = TaskKind::NodeClassification;
        return;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(p));
    } catch (const std::exception& e) {
        throw InputError(p.string() + ": invalid JSON: " + e.what());
    }
    const std::string task = j.value("task", std::string("nc"));
    if (task == "nc") {
        split.task = TaskKind::NodeClassification;
        auto read_part = [&](const char* key, std::vector<NodeId>& out) {
            for (const auto& je : j.value(key, nlohmann::json::array()))
                out.push_back(lookup_node(g, je.get<std::string>(), p, 0));
        };
        read_part("train", split.train);
        read_part("val", split.val);
        read_part("test", split.test);
    } else if (task == "lp") {
        split.task = TaskKind::LinkPrediction;
        auto read_edges = [&](const char* key, std::vector<EdgeRef>& out) {
            for (const auto& je : j.value(key, nlohmann::json::array())) out.push_back(parse_edge_ref(je, g, p));
        };
        read_edges("train", split.train_edges);
        read_edges("val", split.val_edges);
        read_edges("test", split.test_edges);
        read_edges("val_negatives", split.val_negatives);
        read_edges("test_negatives", split.test_negatives);
    } else {
        throw InputError(p.string() + ": unknown task '" + task + "'");
    }
}

} // namespace

Dataset load_dataset(const std::string& dir) {
    const fs::path root(dir);
    Dataset ds;

    ds.schema = parse_schema_json(read_file(root / "schema.json"), (root / "schema.json").string());
    ds.schema.bind(ds.graph.node_types, ds.graph.edge_types);

    const fs::path nodes_path = root / "nodes.tsv";
    for (const TsvRow& row : read_tsv(nodes_path, 2)) {
        auto type = ds.graph.node_types.find(row.fields[1]);
        if (!type)
            throw InputError(nodes_path.string() + ":" + std::to_string(row.line_no) + ": node type '" +
                             row.fields[1] + "' not declared in schema");
        try {
            ds.graph.add_node(row.fields[0], *type);
        } catch (const InputError& e) {
            throw InputError(nodes_path.string() + ":" + std::to_string(row.line_no) + ": " + e.what());
        }
    }

    const fs::path edges_path = root / "edges.tsv";
    for (const TsvRow& row : read_tsv(edges_path, 3)) {
        const NodeId u = lookup_node(ds.graph, row.fields[0], edges_path, row.line_no);
        const NodeId v = lookup_node(ds.graph, row.fields[1], edges_path, row.line_no);
        auto type = ds.graph.edge_types.find(row.fields[2]);
        if (!type)
            throw InputError(edges_path.string() + ":" + std::to_string(row.line_no) + ": edge type '" +
                             row.fields[2] + "' not declared in schema");
        if (!ds.schema.edge_type_allows(*type, ds.graph.node_type[u], ds.graph.node_type[v]))
            throw InputError(edges_path.string() + ":" + std::to_string(row.line_no) + ": edge type '" +
                             row.fields[2] + "' does not connect types '" +
                             ds.graph.node_types.name(ds.graph.node_type[u]) + "' and '" +
                             ds.graph.node_types.name(ds.graph.node_type[v]) + "'");
        try {
            ds.graph.add_edge(u, v, *type);
        } catch (const InputError& e) {
            throw InputError(edges_path.string() + ":" + std::to_string(row.line_no) + ": " + e.what());
        }
    }
    ds.graph.finalize();

    load_features(root / "features.bin", ds.graph);
    load_labels(root / "labels.tsv", ds.graph, ds.split);
    load_split(root / "split.json", ds.graph, ds.split);
    ds.split.validate(ds.graph.num_nodes());
    return ds;
}

void write_dataset(const std::string& dir, const Dataset& ds) {
    const fs::path root(dir);
    fs::create_directories(root);
    const HeteroGraph& g = ds.graph;

    {
        std::ofstream out(root / "schema.json", std::ios::trunc);
        out << ds.schema.to_json() << "\n";
    }
    {
        std::ofstream out(root / "nodes.tsv", std::ios::trunc);
        for (NodeId v = 0; v < g.num_nodes(); ++v)
            out << g.node_name[v] << "\t" << g.node_types.name(g.node_type[v]) << "\n";
    }
    {
        std::ofstream out(root / "edges.tsv", std::ios::trunc);
        for (const Edge& e : g.edges)
            out << g.node_name[e.u] << "\t" << g.node_name[e.v] << "\t" << g.edge_types.name(e.type) << "\n";
    }
    if (g.has_features()) {
        std::ofstream out(root / "features.bin", std::ios::binary | std::ios::trunc);
        const std::uint64_t n = g.num_nodes(), d = g.feature_dim;
        out.write(reinterpret_cast<const char*>(&n), 8);
        out.write(reinterpret_cast<const char*>(&d), 8);
        std::vector<float> raw(g.features.begin(), g.features.end());
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)));
    }
    if (ds.split.has_labels()) {
        std::ofstream out(root / "labels.tsv", std::ios::trunc);
        for (NodeId v = 0; v < g.num_nodes(); ++v) {
            const int cls = ds.split.label_of(v);
            if (cls >= 0) out << g.node_name[v] << "\t" << cls << "\n";
        }
    }
    {
        nlohmann::json j;
        const LabeledSplit& s = ds.split;
        if (s.task == TaskKind::NodeClassification) {
            if (!s.train.empty() || !s.val.empty() || !s.test.empty()) {
                j["task"] = "nc";
                auto dump = [&](const std::vector<NodeId>& ids) {
                    nlohmann::json a = nlohmann::json::array();
                    for (NodeId v : ids) a.push_back(g.node_name[v]);
                    return a;
                };
                j["train"] = dump(s.train);
                j["val"] = dump(s.val);
                j["test"] = dump(s.test);
            }
        } else {
            j["task"] = "lp";
            auto dump = [&](const std::vector<EdgeRef>& es) {
                nlohmann::json a = nlohmann::json::array();
                for (const EdgeRef& e : es)
                    a.push_back({g.node_name[e.u], g.node_name[e.v], g.edge_types.name(e.type)});
                return a;
            };
            j["train"] = dump(s.train_edges);
            j["val"] = dump(s.val_edges);
            j["test"] = dump(s.test_edges);
            j["val_negatives"] = dump(s.val_negatives);
            j["test_negatives"] = dump(s.test_negatives);
        }
        if (!j.empty()) {
            std::ofstream out(root / "split.json", std::ios::trunc);
            out << j.dump(2) << "\n";
        }
    }
}

} // namespace ontograph
