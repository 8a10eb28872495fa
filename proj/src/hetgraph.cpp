#include "shgnn/hetgraph.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "shgnn/error.hpp"

namespace shgnn {

using nlohmann::json;

const std::vector<NodeId> HeteroGraph::kEmpty{};

int Schema::type_index(const std::string& name) const {
    for (std::size_t i = 0; i < node_types.size(); ++i)
        if (node_types[i] == name) return static_cast<int>(i);
    return -1;
}

bool Schema::has_edge_type(int a, int b) const {
    for (const auto& [x, y] : edge_types) {
        int xi = type_index(x), yi = type_index(y);
        if ((xi == a && yi == b) || (xi == b && yi == a)) return true;
    }
    return false;
}

void Schema::validate() const {
    if (node_types.empty()) throw ValidationError("schema: no node types");
    std::set<std::string> seen;
    for (const auto& t : node_types)
        if (!seen.insert(t).second) throw ValidationError("schema: duplicate node type '" + t + "'");
    if (node_types.size() + edge_types.size() <= 2)
        throw ValidationError("schema: |node types| + |edge types| must exceed 2, got " +
                              std::to_string(node_types.size() + edge_types.size()));
    for (const auto& [a, b] : edge_types) {
        if (type_index(a) < 0 || type_index(b) < 0)
            throw ValidationError("schema: edge type (" + a + "," + b + ") references undeclared node type");
    }
    if (type_index(basic_type) < 0)
        throw ValidationError("schema: basic type '" + basic_type + "' not declared");

    // schema graph connectivity over types
    std::size_t n = node_types.size();
    std::vector<int> comp(n, -1);
    std::vector<std::size_t> stack{0};
    comp[0] = 0;
    while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (const auto& [a, b] : edge_types) {
            std::size_t x = static_cast<std::size_t>(type_index(a));
            std::size_t y = static_cast<std::size_t>(type_index(b));
            if (x == u && comp[y] < 0) { comp[y] = 0; stack.push_back(y); }
            if (y == u && comp[x] < 0) { comp[x] = 0; stack.push_back(x); }
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (comp[i] < 0)
            throw ValidationError("schema: type '" + node_types[i] + "' is disconnected from the schema graph");
}

std::size_t HeteroGraph::type_count(int t) const {
    NodeId end = (t + 1 < num_types()) ? type_offset[t + 1] : num_nodes();
    return static_cast<std::size_t>(end - type_offset[t]);
}

NodeId HeteroGraph::find_original(std::int64_t original_id) const {
    if (original_lookup_.empty() && num_nodes() > 0) {
        for (NodeId v = 0; v < num_nodes(); ++v) original_lookup_[original_ids[v]] = v;
    }
    auto it = original_lookup_.find(original_id);
    return it == original_lookup_.end() ? NodeId{-1} : it->second;
}

const std::vector<NodeId>& HeteroGraph::neighbors_of_type(NodeId v, int t) const {
    if (v < 0 || v >= num_nodes()) throw ValidationError("neighbors_of_type: node out of range");
    if (t < 0 || t >= num_types()) throw ValidationError("neighbors_of_type: unknown type");
    return adj[static_cast<std::size_t>(t)][static_cast<std::size_t>(v)];
}

const std::vector<NodeId>& HeteroGraph::neighbors_of_type(NodeId v, const std::string& t) const {
    return neighbors_of_type(v, schema.type_index(t));
}

std::vector<NodeId> HeteroGraph::all_neighbors(NodeId v) const {
    std::vector<NodeId> out;
    for (int t = 0; t < num_types(); ++t) {
        const auto& ns = adj[static_cast<std::size_t>(t)][static_cast<std::size_t>(v)];
        out.insert(out.end(), ns.begin(), ns.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

DatasetStats Dataset::stats() const {
    DatasetStats s;
    for (int t = 0; t < graph.num_types(); ++t) s.nodes_per_type.push_back(graph.type_count(t));
    s.edges_per_type = std::vector<std::size_t>(graph.edge_count.begin(), graph.edge_count.end());
    s.num_classes = graph.schema.num_classes;
    s.train_size = splits.train.size();
    s.val_size = splits.val.size();
    s.test_size = splits.test.size();
    return s;
}

GraphBuilder::GraphBuilder(Schema schema) : schema_(std::move(schema)) {
    schema_.validate();
    nodes_by_type_.resize(schema_.node_types.size());
}

void GraphBuilder::add_node(const std::string& type, std::int64_t original_id) {
    int t = schema_.type_index(type);
    if (t < 0) throw ValidationError("add_node: unknown type '" + type + "'");
    auto [it, inserted] = type_by_id_.emplace(original_id, t);
    if (!inserted)
        throw ValidationError("add_node: duplicate original id " + std::to_string(original_id));
    nodes_by_type_[static_cast<std::size_t>(t)].push_back(original_id);
}

void GraphBuilder::add_edge(std::int64_t a, std::int64_t b) {
    raw_edges_.emplace_back(a, b);
}

void GraphBuilder::set_label(std::int64_t original_id, int cls) {
    label_by_id_[original_id] = cls;
}

void GraphBuilder::set_features(std::int64_t original_id, const std::map<int, double>& row) {
    features_by_id_[original_id] = row;
}

HeteroGraph GraphBuilder::build(std::vector<std::string>* warnings) {
    HeteroGraph g;
    g.schema = schema_;
    int ntypes = g.num_types();

    for (auto& ids : nodes_by_type_) std::sort(ids.begin(), ids.end());
    g.type_offset.resize(static_cast<std::size_t>(ntypes));
    for (int t = 0; t < ntypes; ++t) {
        g.type_offset[static_cast<std::size_t>(t)] = static_cast<NodeId>(g.original_ids.size());
        for (std::int64_t id : nodes_by_type_[static_cast<std::size_t>(t)]) {
            g.original_ids.push_back(id);
            g.type_of.push_back(t);
        }
    }
    NodeId n = g.num_nodes();

    std::map<std::int64_t, NodeId> lookup;
    for (NodeId v = 0; v < n; ++v) lookup[g.original_ids[static_cast<std::size_t>(v)]] = v;

    g.adj.assign(static_cast<std::size_t>(ntypes),
                 std::vector<std::vector<NodeId>>(static_cast<std::size_t>(n)));
    g.edge_count.assign(schema_.edge_types.size(), 0);

    auto edge_type_of = [&](int ta, int tb) -> int {
        for (std::size_t e = 0; e < schema_.edge_types.size(); ++e) {
            int x = schema_.type_index(schema_.edge_types[e].first);
            int y = schema_.type_index(schema_.edge_types[e].second);
            if ((x == ta && y == tb) || (x == tb && y == ta)) return static_cast<int>(e);
        }
        return -1;
    };

    std::set<std::pair<NodeId, NodeId>> seen_edges;
    std::size_t duplicates = 0;
    for (const auto& [oa, ob] : raw_edges_) {
        auto ia = lookup.find(oa), ib = lookup.find(ob);
        if (ia == lookup.end() || ib == lookup.end())
            throw ValidationError("edge (" + std::to_string(oa) + "," + std::to_string(ob) +
                                  ") references an undeclared node");
        NodeId u = ia->second, v = ib->second;
        int tu = g.type_of[static_cast<std::size_t>(u)], tv = g.type_of[static_cast<std::size_t>(v)];
        int et = edge_type_of(tu, tv);
        if (et < 0)
            throw ValidationError("edge (" + std::to_string(oa) + "," + std::to_string(ob) +
                                  ") has undeclared edge type (" + schema_.node_types[static_cast<std::size_t>(tu)] +
                                  "," + schema_.node_types[static_cast<std::size_t>(tv)] + ")");
        auto key = std::minmax(u, v);
        if (!seen_edges.insert({key.first, key.second}).second) {
            ++duplicates;
            continue;
        }
        g.adj[static_cast<std::size_t>(tv)][static_cast<std::size_t>(u)].push_back(v);
        if (u != v) g.adj[static_cast<std::size_t>(tu)][static_cast<std::size_t>(v)].push_back(u);
        ++g.edge_count[static_cast<std::size_t>(et)];
    }
    if (duplicates > 0 && warnings)
        warnings->push_back("deduplicated " + std::to_string(duplicates) + " repeated raw edges");

    for (auto& per_type : g.adj)
        for (auto& ns : per_type) std::sort(ns.begin(), ns.end());

    g.labels.assign(static_cast<std::size_t>(n), -1);
    int basic = schema_.basic_type_index();
    for (const auto& [oid, cls] : label_by_id_) {
        auto it = lookup.find(oid);
        if (it == lookup.end())
            throw ValidationError("label references undeclared node " + std::to_string(oid));
        if (g.type_of[static_cast<std::size_t>(it->second)] != basic)
            throw ValidationError("label on non-basic-type node " + std::to_string(oid));
        if (cls < 0 || cls >= schema_.num_classes)
            throw ValidationError("label " + std::to_string(cls) + " outside [0," +
                                  std::to_string(schema_.num_classes) + ") for node " + std::to_string(oid));
        g.labels[static_cast<std::size_t>(it->second)] = cls;
    }

    // per-type feature matrices; dimension = max index + 1 over the type's rows
    g.features.assign(static_cast<std::size_t>(ntypes), Mat{});
    g.feature_dim.assign(static_cast<std::size_t>(ntypes), -1);
    std::vector<int> dim_by_type(static_cast<std::size_t>(ntypes), -1);
    for (const auto& [oid, row] : features_by_id_) {
        auto it = lookup.find(oid);
        if (it == lookup.end())
            throw ValidationError("feature row references undeclared node " + std::to_string(oid));
        int t = g.type_of[static_cast<std::size_t>(it->second)];
        int& d = dim_by_type[static_cast<std::size_t>(t)];
        d = std::max(d, 0);
        for (const auto& [idx, val] : row) {
            (void)val;
            if (idx < 0) throw ValidationError("negative feature index for node " + std::to_string(oid));
            d = std::max(d, idx + 1);
        }
    }
    for (int t = 0; t < ntypes; ++t) {
        int d = dim_by_type[static_cast<std::size_t>(t)];
        if (d < 0) continue;
        g.feature_dim[static_cast<std::size_t>(t)] = d;
        g.features[static_cast<std::size_t>(t)] = Mat(g.type_count(t), static_cast<std::size_t>(d));
    }
    for (const auto& [oid, row] : features_by_id_) {
        NodeId v = lookup.at(oid);
        int t = g.type_of[static_cast<std::size_t>(v)];
        std::size_t local = g.local_index(v);
        for (const auto& [idx, val] : row)
            g.features[static_cast<std::size_t>(t)](local, static_cast<std::size_t>(idx)) = val;
    }

    if (g.feature_dim[static_cast<std::size_t>(basic)] < 0)
        throw ValidationError("basic type '" + schema_.basic_type + "' has no features");

    return g;
}

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw LoadError("missing file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::int64_t parse_id(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        std::int64_t v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("bad node id '" + s + "' in " + where);
    }
}

// Applies fn(line, line_number) to every non-empty line.
template <typename Fn>
void for_lines(const std::filesystem::path& p, Fn&& fn) {
    std::string text = read_file(p);
    std::size_t start = 0, lineno = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find('\n', start);
        std::string line = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++lineno;
        if (!line.empty()) fn(line, lineno);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
}

Schema load_schema(const std::filesystem::path& p) {
    json j;
    try {
        j = json::parse(read_file(p));
    } catch (const json::exception& e) {
        throw ValidationError("schema.json: " + std::string(e.what()));
    }
    Schema s;
    for (const auto& t : j.at("node_types")) s.node_types.push_back(t.get<std::string>());
    for (const auto& e : j.at("edge_types"))
        s.edge_types.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    s.basic_type = j.at("basic_type").get<std::string>();
    s.num_classes = j.at("num_classes").get<int>();
    return s;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& dir) {
    Dataset ds;
    Schema schema = load_schema(dir / "schema.json");
    schema.validate();
    GraphBuilder builder(schema);

    for (const auto& type : schema.node_types) {
        auto path = dir / ("nodes_" + type + ".tsv");
        for_lines(path, [&](const std::string& line, std::size_t lineno) {
            builder.add_node(type, parse_id(line, path.filename().string() + ":" + std::to_string(lineno)));
        });
    }

    for (const auto& [a, b] : schema.edge_types) {
        auto path = dir / ("edges_" + a + "_" + b + ".tsv");
        for_lines(path, [&](const std::string& line, std::size_t lineno) {
            auto parts = split_tabs(line);
            std::string where = path.filename().string() + ":" + std::to_string(lineno);
            if (parts.size() != 2) throw ValidationError("expected src<TAB>dst in " + where);
            builder.add_edge(parse_id(parts[0], where), parse_id(parts[1], where));
        });
    }

    for (const auto& type : schema.node_types) {
        auto path = dir / ("features_" + type + ".tsv");
        bool required = (type == schema.basic_type);
        if (!std::filesystem::exists(path)) {
            if (required) throw LoadError("missing file: " + path.string());
            continue;
        }
        for_lines(path, [&](const std::string& line, std::size_t lineno) {
            auto parts = split_tabs(line);
            std::string where = path.filename().string() + ":" + std::to_string(lineno);
            std::map<int, double> row;
            for (std::size_t i = 1; i < parts.size(); ++i) {
                if (parts[i].empty()) continue;
                std::size_t colon = parts[i].find(':');
                if (colon == std::string::npos)
                    throw ValidationError("expected dim:value in " + where);
                try {
                    row[std::stoi(parts[i].substr(0, colon))] = std::stod(parts[i].substr(colon + 1));
                } catch (const std::exception&) {
                    throw ValidationError("bad dim:value '" + parts[i] + "' in " + where);
                }
            }
            builder.set_features(parse_id(parts[0], where), row);
        });
    }

    {
        auto path = dir / "labels.tsv";
        for_lines(path, [&](const std::string& line, std::size_t lineno) {
            auto parts = split_tabs(line);
            std::string where = path.filename().string() + ":" + std::to_string(lineno);
            if (parts.size() != 2) throw ValidationError("expected node_id<TAB>class in " + where);
            try {
                builder.set_label(parse_id(parts[0], where), std::stoi(parts[1]));
            } catch (const ValidationError&) {
                throw;
            } catch (const std::exception&) {
                throw ValidationError("bad class index '" + parts[1] + "' in " + where);
            }
        });
    }

    ds.graph = builder.build(&ds.warnings);

    // empty declared edge files are legal; note them
    for (std::size_t e = 0; e < schema.edge_types.size(); ++e)
        if (ds.graph.edge_count[e] == 0)
            ds.warnings.push_back("edge type (" + schema.edge_types[e].first + "," +
                                  schema.edge_types[e].second + ") has zero edges");

    json sj;
    try {
        sj = json::parse(read_file(dir / "splits.json"));
    } catch (const json::exception& e) {
        throw ValidationError("splits.json: " + std::string(e.what()));
    }
    auto read_split = [&](const char* primary, const char* alias) {
        std::vector<NodeId> out;
        const json* arr = nullptr;
        if (sj.contains(primary)) arr = &sj.at(primary);
        else if (alias && sj.contains(alias)) arr = &sj.at(alias);
        else throw ValidationError(std::string("splits.json: missing '") + primary + "' list");
        for (const auto& v : *arr) {
            NodeId g = ds.graph.find_original(v.get<std::int64_t>());
            if (g < 0)
                throw ValidationError("splits.json references unknown node " + v.dump());
            out.push_back(g);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    ds.splits.train = read_split("train", nullptr);
    ds.splits.val = read_split("validation", "val");
    ds.splits.test = read_split("test", nullptr);

    // splits must be disjoint and cover exactly the labeled nodes
    std::vector<NodeId> all;
    for (const auto* s : {&ds.splits.train, &ds.splits.val, &ds.splits.test})
        all.insert(all.end(), s->begin(), s->end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 1; i < all.size(); ++i)
        if (all[i] == all[i - 1])
            throw ValidationError("overlapping splits: node " +
                                  std::to_string(ds.graph.original_ids[static_cast<std::size_t>(all[i])]) +
                                  " appears in more than one split");
    std::vector<NodeId> labeled;
    for (NodeId v = 0; v < ds.graph.num_nodes(); ++v)
        if (ds.graph.labels[static_cast<std::size_t>(v)] >= 0) labeled.push_back(v);
    if (all != labeled)
        throw ValidationError("splits must cover exactly the labeled nodes (" +
                              std::to_string(all.size()) + " split ids vs " +
                              std::to_string(labeled.size()) + " labeled)");
    return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const HeteroGraph& g = ds.graph;

    json sj;
    sj["node_types"] = g.schema.node_types;
    sj["edge_types"] = json::array();
    for (const auto& [a, b] : g.schema.edge_types) sj["edge_types"].push_back({a, b});
    sj["basic_type"] = g.schema.basic_type;
    sj["num_classes"] = g.schema.num_classes;
    std::ofstream(dir / "schema.json") << sj.dump(2) << "\n";

    for (int t = 0; t < g.num_types(); ++t) {
        std::ofstream out(dir / ("nodes_" + g.schema.node_types[static_cast<std::size_t>(t)] + ".tsv"));
        for (std::size_t i = 0; i < g.type_count(t); ++i)
            out << g.original_ids[static_cast<std::size_t>(g.global_id(t, i))] << "\n";
    }

    for (std::size_t e = 0; e < g.schema.edge_types.size(); ++e) {
        const auto& [a, b] = g.schema.edge_types[e];
        int ta = g.schema.type_index(a), tb = g.schema.type_index(b);
        std::ofstream out(dir / ("edges_" + a + "_" + b + ".tsv"));
        for (std::size_t i = 0; i < g.type_count(ta); ++i) {
            NodeId u = g.global_id(ta, i);
            for (NodeId v : g.neighbors_of_type(u, tb)) {
                if (ta == tb && v < u) continue;  // same-type edges once
                out << g.original_ids[static_cast<std::size_t>(u)] << "\t"
                    << g.original_ids[static_cast<std::size_t>(v)] << "\n";
            }
        }
    }

    char buf[64];
    for (int t = 0; t < g.num_types(); ++t) {
        if (g.feature_dim[static_cast<std::size_t>(t)] < 0) continue;
        std::ofstream out(dir / ("features_" + g.schema.node_types[static_cast<std::size_t>(t)] + ".tsv"));
        const Mat& f = g.features[static_cast<std::size_t>(t)];
        for (std::size_t i = 0; i < f.rows; ++i) {
            out << g.original_ids[static_cast<std::size_t>(g.global_id(t, i))];
            for (std::size_t jcol = 0; jcol < f.cols; ++jcol) {
                double v = f(i, jcol);
                if (v == 0.0) continue;
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << "\t" << jcol << ":" << buf;
            }
            out << "\n";
        }
    }

    {
        std::ofstream out(dir / "labels.tsv");
        for (NodeId v = 0; v < g.num_nodes(); ++v)
            if (g.labels[static_cast<std::size_t>(v)] >= 0)
                out << g.original_ids[static_cast<std::size_t>(v)] << "\t"
                    << g.labels[static_cast<std::size_t>(v)] << "\n";
    }

    json spj;
    auto orig = [&](const std::vector<NodeId>& ids) {
        std::vector<std::int64_t> out;
        for (NodeId v : ids) out.push_back(g.original_ids[static_cast<std::size_t>(v)]);
        return out;
    };
    spj["train"] = orig(ds.splits.train);
    spj["validation"] = orig(ds.splits.val);
    spj["test"] = orig(ds.splits.test);
    std::ofstream(dir / "splits.json") << spj.dump(2) << "\n";
}

}  // namespace shgnn
