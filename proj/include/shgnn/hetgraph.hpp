#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shgnn/mat.hpp"

namespace shgnn {

using NodeId = std::int32_t;  // dense global id assigned at load

// Typed-graph schema: node types, undirected edge types, designated basic type.
struct Schema {
    std::vector<std::string> node_types;
    std::vector<std::pair<std::string, std::string>> edge_types;
    std::string basic_type;
    int num_classes = 0;

    int type_index(const std::string& name) const;
    int basic_type_index() const { return type_index(basic_type); }
    bool has_edge_type(int a, int b) const;

    // Throws ValidationError on: |types|+|edge types| <= 2, undeclared type in
    // an edge type, basic type missing, or a disconnected schema graph.
    void validate() const;
};

struct DatasetStats {
    std::vector<std::size_t> nodes_per_type;       // aligned with schema.node_types
    std::vector<std::size_t> edges_per_type;       // aligned with schema.edge_types
    int num_classes = 0;
    std::size_t train_size = 0, val_size = 0, test_size = 0;
};

// Immutable typed graph. Nodes carry dense global ids: per type, original ids
// are sorted ascending and types are concatenated in schema order.
class HeteroGraph {
public:
    Schema schema;
    std::vector<std::int64_t> original_ids;  // by global id
    std::vector<int> type_of;                // phi, by global id
    std::vector<NodeId> type_offset;         // first global id per type
    std::vector<std::size_t> edge_count;     // undirected count per edge type

    // adj_[t][v] = sorted, duplicate-free neighbors of v having type t
    std::vector<std::vector<std::vector<NodeId>>> adj;

    std::vector<int> labels;        // class index or -1, by global id
    std::vector<Mat> features;      // per type, rows = nodes of type; empty if absent
    std::vector<int> feature_dim;   // per type, -1 if absent

    NodeId num_nodes() const { return static_cast<NodeId>(original_ids.size()); }
    int num_types() const { return static_cast<int>(schema.node_types.size()); }
    std::size_t type_count(int t) const;
    NodeId global_id(int type, std::size_t local) const { return type_offset[type] + static_cast<NodeId>(local); }
    std::size_t local_index(NodeId v) const { return static_cast<std::size_t>(v - type_offset[type_of[v]]); }

    // Dense global id for an original id, or -1.
    NodeId find_original(std::int64_t original_id) const;

    // Sorted duplicate-free direct neighbors of v having type t; empty when no
    // edge type connects phi(v) and t.
    const std::vector<NodeId>& neighbors_of_type(NodeId v, int t) const;
    const std::vector<NodeId>& neighbors_of_type(NodeId v, const std::string& t) const;

    // Direct neighbors of every type, ascending.
    std::vector<NodeId> all_neighbors(NodeId v) const;

private:
    mutable std::map<std::int64_t, NodeId> original_lookup_;  // built lazily
    static const std::vector<NodeId> kEmpty;
};

struct Splits {
    std::vector<NodeId> train, val, test;
};

struct Dataset {
    HeteroGraph graph;
    Splits splits;
    std::vector<std::string> warnings;

    DatasetStats stats() const;
};

// In-memory construction; load_dataset and the synthetic generator both go
// through this. Original ids are globally unique.
class GraphBuilder {
public:
    explicit GraphBuilder(Schema schema);

    void add_node(const std::string& type, std::int64_t original_id);
    void add_edge(std::int64_t a, std::int64_t b);  // types inferred, stored symmetrically
    void set_label(std::int64_t original_id, int cls);
    // Sparse feature row; dim -> value. Empty rows are allowed.
    void set_features(std::int64_t original_id, const std::map<int, double>& row);

    // Validates, sorts, assigns dense ids. Duplicate raw edges are removed and
    // counted in warnings. feature_dims: per-type dimension override; when a
    // type has any feature rows its dimension is max(index)+1 unless given.
    HeteroGraph build(std::vector<std::string>* warnings = nullptr);

private:
    Schema schema_;
    std::vector<std::vector<std::int64_t>> nodes_by_type_;
    std::vector<std::pair<std::int64_t, std::int64_t>> raw_edges_;
    std::map<std::int64_t, int> label_by_id_;
    std::map<std::int64_t, std::map<int, double>> features_by_id_;
    std::map<std::int64_t, int> type_by_id_;
};

// Loads the tab-separated dataset directory layout (schema.json,
// nodes_<Type>.tsv, edges_<A>_<B>.tsv, features_<Type>.tsv, labels.tsv,
// splits.json). Throws LoadError / ValidationError.
Dataset load_dataset(const std::filesystem::path& dir);

// Inverse of load_dataset; writes the same layout.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

}  // namespace shgnn
