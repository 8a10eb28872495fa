#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shgnn/hetgraph.hpp"

namespace shgnn {

// Ordered node-type sequence expressing a composite relation, e.g. M-A-M.
struct MetaPath {
    std::vector<std::string> types;
    std::vector<int> type_ids;  // resolved against a schema

    static MetaPath parse(const std::string& dashed, const Schema& schema);
    static MetaPath from_types(std::vector<std::string> types, const Schema& schema);

    std::size_t length() const { return types.size(); }  // node positions
    int start_type() const { return type_ids.front(); }
    int end_type() const { return type_ids.back(); }
    bool symmetric() const;
    std::string to_string() const;  // dash-joined

    // length >= 2 and every consecutive pair is a declared edge type
    void validate(const Schema& schema) const;
};

// Concrete node sequence matching a meta-path, start to target.
struct MetaPathInstance {
    std::vector<NodeId> nodes;
    bool operator==(const MetaPathInstance&) const = default;
};

// Prefix-merged rooted tree of all instances ending at one target. Node 0 is
// the root (the target, depth 0); a node at depth k corresponds to instance
// position length-1-k, so every root-to-leaf path reversed is an instance.
struct AggregationTree {
    struct Node {
        NodeId graph_node;
        int parent;  // -1 for root
        int depth;
    };
    NodeId target = -1;
    int instance_length = 0;  // node positions in the meta-path
    std::vector<Node> nodes;
    std::vector<std::vector<int>> children;  // sorted by graph node id

    int max_depth() const { return instance_length - 1; }
    bool degenerate() const { return nodes.size() == 1; }
    std::vector<int> leaves() const;          // tree indices at max depth, DFS order
    std::size_t leaf_count() const;
    std::vector<int> bottom_up_order() const;  // deepest first
};

// All instances of p ending at target, found by depth-first expansion backward
// from the target with children visited in ascending node id. Sequences may
// revisit nodes; v-a-v style self instances appear naturally.
// max_instances == 0 means unlimited; exceeding a nonzero cap throws
// ValidationError.
std::vector<MetaPathInstance> enumerate_instances(const HeteroGraph& g, const MetaPath& p,
                                                  NodeId target, std::size_t max_instances = 0);

// Instance start nodes with multiplicity (one entry per instance), ascending.
std::vector<NodeId> metapath_neighbors(const HeteroGraph& g, const MetaPath& p, NodeId v,
                                       std::size_t max_instances = 0);

AggregationTree build_tree(const HeteroGraph& g, const MetaPath& p, NodeId target,
                           std::size_t max_instances = 0);

// Trees for every node of the end type, indexed by local node index.
// Parallel across targets.
std::vector<AggregationTree> build_all_trees(const HeteroGraph& g, const MetaPath& p,
                                             std::size_t max_instances = 0);

// Instance counts per (start, end) node pair as the product of the biadjacency
// matrices along p. rows = nodes of start type, cols = nodes of end type,
// indexed by local node index. Parallel across rows.
struct CountMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<std::uint64_t> a;
    std::uint64_t& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    std::uint64_t operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};
CountMatrix neighbor_counts_via_matrices(const HeteroGraph& g, const MetaPath& p);

}  // namespace shgnn
