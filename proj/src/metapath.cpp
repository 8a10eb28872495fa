#include "shgnn/metapath.hpp"

#include <algorithm>

#include "shgnn/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shgnn {

MetaPath MetaPath::parse(const std::string& dashed, const Schema& schema) {
    std::vector<std::string> types;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = dashed.find('-', start);
        types.push_back(dashed.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return from_types(std::move(types), schema);
}

MetaPath MetaPath::from_types(std::vector<std::string> types, const Schema& schema) {
    MetaPath p;
    p.types = std::move(types);
    for (const auto& t : p.types) {
        int idx = schema.type_index(t);
        if (idx < 0) throw ValidationError("meta-path: unknown node type '" + t + "'");
        p.type_ids.push_back(idx);
    }
    p.validate(schema);
    return p;
}

bool MetaPath::symmetric() const {
    return std::equal(type_ids.begin(), type_ids.end(), type_ids.rbegin());
}

std::string MetaPath::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (i) out += '-';
        out += types[i];
    }
    return out;
}

void MetaPath::validate(const Schema& schema) const {
    if (types.size() < 2) throw ValidationError("meta-path must have at least 2 node positions");
    for (std::size_t i = 0; i + 1 < type_ids.size(); ++i)
        if (!schema.has_edge_type(type_ids[i], type_ids[i + 1]))
            throw ValidationError("meta-path " + to_string() + ": (" + types[i] + "," +
                                  types[i + 1] + ") is not a declared edge type");
}

std::vector<int> AggregationTree::leaves() const {
    std::vector<int> out;
    if (degenerate()) return out;
    // DFS from the root so leaf order matches enumeration order
    std::vector<int> stack{0};
    std::vector<int> result;
    // iterative DFS preserving child order: push children reversed
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        if (nodes[static_cast<std::size_t>(u)].depth == max_depth()) {
            result.push_back(u);
            continue;
        }
        const auto& ch = children[static_cast<std::size_t>(u)];
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return result;
}

std::size_t AggregationTree::leaf_count() const {
    if (degenerate()) return 0;
    std::size_t n = 0;
    for (const auto& node : nodes)
        if (node.depth == max_depth()) ++n;
    return n;
}

std::vector<int> AggregationTree::bottom_up_order() const {
    std::vector<int> order(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return nodes[static_cast<std::size_t>(a)].depth > nodes[static_cast<std::size_t>(b)].depth;
    });
    return order;
}

namespace {

void check_target_type(const HeteroGraph& g, const MetaPath& p, NodeId target) {
    if (target < 0 || target >= g.num_nodes())
        throw ValidationError("target node out of range");
    if (g.type_of[static_cast<std::size_t>(target)] != p.end_type())
        throw ValidationError("target node type does not match the end of meta-path " + p.to_string());
}

}  // namespace

std::vector<MetaPathInstance> enumerate_instances(const HeteroGraph& g, const MetaPath& p,
                                                  NodeId target, std::size_t max_instances) {
    check_target_type(g, p, target);
    const int last = static_cast<int>(p.length()) - 1;

    std::vector<MetaPathInstance> out;
    std::vector<NodeId> current(p.length());
    current[static_cast<std::size_t>(last)] = target;

    // expand backward from the target; children in ascending id order
    auto dfs = [&](auto&& self, int pos) -> void {
        if (pos == 0) {
            if (max_instances != 0 && out.size() >= max_instances)
                throw ValidationError("instance cap " + std::to_string(max_instances) +
                                      " exceeded for meta-path " + p.to_string());
            out.push_back({current});
            return;
        }
        NodeId here = current[static_cast<std::size_t>(pos)];
        for (NodeId prev : g.neighbors_of_type(here, p.type_ids[static_cast<std::size_t>(pos - 1)])) {
            current[static_cast<std::size_t>(pos - 1)] = prev;
            self(self, pos - 1);
        }
    };
    dfs(dfs, last);
    return out;
}

std::vector<NodeId> metapath_neighbors(const HeteroGraph& g, const MetaPath& p, NodeId v,
                                       std::size_t max_instances) {
    auto instances = enumerate_instances(g, p, v, max_instances);
    std::vector<NodeId> out;
    out.reserve(instances.size());
    for (const auto& inst : instances) out.push_back(inst.nodes.front());
    std::sort(out.begin(), out.end());
    return out;
}

AggregationTree build_tree(const HeteroGraph& g, const MetaPath& p, NodeId target,
                           std::size_t max_instances) {
    check_target_type(g, p, target);
    AggregationTree tree;
    tree.target = target;
    tree.instance_length = static_cast<int>(p.length());
    tree.nodes.push_back({target, -1, 0});
    tree.children.emplace_back();

    const int depth_max = tree.max_depth();
    std::size_t leaf_budget = 0;

    // BFS level by level; a parent's children are its distinct typed neighbors,
    // already sorted in the adjacency lists (trie merge is implicit)
    std::vector<int> frontier{0};
    for (int depth = 1; depth <= depth_max; ++depth) {
        int want_type = p.type_ids[static_cast<std::size_t>(tree.instance_length - 1 - depth)];
        std::vector<int> next;
        for (int ti : frontier) {
            NodeId u = tree.nodes[static_cast<std::size_t>(ti)].graph_node;
            for (NodeId w : g.neighbors_of_type(u, want_type)) {
                int idx = static_cast<int>(tree.nodes.size());
                tree.nodes.push_back({w, ti, depth});
                tree.children.emplace_back();
                tree.children[static_cast<std::size_t>(ti)].push_back(idx);
                next.push_back(idx);
                if (depth == depth_max) {
                    ++leaf_budget;
                    if (max_instances != 0 && leaf_budget > max_instances)
                        throw ValidationError("instance cap " + std::to_string(max_instances) +
                                              " exceeded for meta-path " + p.to_string());
                }
            }
        }
        frontier = std::move(next);
    }

    // a partial expansion that dies out early is pruned back to the bare root
    if (frontier.empty()) {
        tree.nodes.resize(1);
        tree.children.assign(1, {});
        return tree;
    }
    // prune internal branches with no leaf underneath (nodes whose expansion
    // stalled before max depth)
    std::vector<char> keep(tree.nodes.size(), 0);
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        if (tree.nodes[i].depth != depth_max) continue;
        int u = static_cast<int>(i);
        while (u >= 0 && !keep[static_cast<std::size_t>(u)]) {
            keep[static_cast<std::size_t>(u)] = 1;
            u = tree.nodes[static_cast<std::size_t>(u)].parent;
        }
    }
    if (std::find(keep.begin(), keep.end(), 0) != keep.end()) {
        AggregationTree pruned;
        pruned.target = tree.target;
        pruned.instance_length = tree.instance_length;
        std::vector<int> remap(tree.nodes.size(), -1);
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            if (!keep[i]) continue;
            remap[i] = static_cast<int>(pruned.nodes.size());
            auto node = tree.nodes[i];
            if (node.parent >= 0) node.parent = remap[static_cast<std::size_t>(node.parent)];
            pruned.nodes.push_back(node);
            pruned.children.emplace_back();
            if (node.parent >= 0)
                pruned.children[static_cast<std::size_t>(node.parent)].push_back(remap[i]);
        }
        return pruned;
    }
    return tree;
}

std::vector<AggregationTree> build_all_trees(const HeteroGraph& g, const MetaPath& p,
                                             std::size_t max_instances) {
    int t = p.end_type();
    std::size_t n = g.type_count(t);
    std::vector<AggregationTree> trees(n);
    std::exception_ptr error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        try {
            trees[static_cast<std::size_t>(i)] =
                build_tree(g, p, g.global_id(t, static_cast<std::size_t>(i)), max_instances);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return trees;
}

namespace {

// CSR over one biadjacency step of the meta-path.
struct CsrStep {
    std::size_t rows = 0, cols = 0;
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> targets;
};

CsrStep biadjacency(const HeteroGraph& g, int from_type, int to_type) {
    CsrStep m;
    m.rows = g.type_count(from_type);
    m.cols = g.type_count(to_type);
    m.offsets.assign(m.rows + 1, 0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        NodeId u = g.global_id(from_type, i);
        const auto& ns = g.neighbors_of_type(u, to_type);
        m.offsets[i + 1] = m.offsets[i] + ns.size();
        for (NodeId w : ns) m.targets.push_back(g.local_index(w));
    }
    return m;
}

}  // namespace

CountMatrix neighbor_counts_via_matrices(const HeteroGraph& g, const MetaPath& p) {
    const std::size_t steps = p.length() - 1;
    const std::size_t start_n = g.type_count(p.start_type());
    const std::size_t end_n = g.type_count(p.end_type());

    std::vector<CsrStep> mats;
    mats.reserve(steps);
    for (std::size_t s = 0; s < steps; ++s)
        mats.push_back(biadjacency(g, p.type_ids[s], p.type_ids[s + 1]));

    CountMatrix out;
    out.rows = start_n;
    out.cols = end_n;
    out.a.assign(start_n * end_n, 0);

    // row-parallel sparse chain product; each row propagates its count vector
    // through the steps
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        std::vector<std::uint64_t> cur, next;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 16)
#endif
        for (std::int64_t r = 0; r < static_cast<std::int64_t>(start_n); ++r) {
            cur.assign(mats[0].cols, 0);
            const auto& m0 = mats[0];
            for (std::size_t e = m0.offsets[static_cast<std::size_t>(r)];
                 e < m0.offsets[static_cast<std::size_t>(r) + 1]; ++e)
                cur[m0.targets[e]] += 1;
            for (std::size_t s = 1; s < steps; ++s) {
                const auto& m = mats[s];
                next.assign(m.cols, 0);
                for (std::size_t i = 0; i < m.rows; ++i) {
                    std::uint64_t c = cur[i];
                    if (c == 0) continue;
                    for (std::size_t e = m.offsets[i]; e < m.offsets[i + 1]; ++e)
                        next[m.targets[e]] += c;
                }
                cur.swap(next);
            }
            std::copy(cur.begin(), cur.end(), out.a.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(r) * end_n));
        }
    }
    return out;
}

}  // namespace shgnn
