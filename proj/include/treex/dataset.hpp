#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "treex/graph.hpp"
#include "treex/io.hpp"
#include "treex/rng.hpp"

namespace treex {

struct Dataset {
    std::string name;
    int class_count = 0;
    std::vector<Graph> graphs;
    std::vector<int> labels;
    std::uint64_t generator_seed = 0;

    void validate() const {
        if (labels.size() != graphs.size()) throw InputError("Dataset: labels/graphs size mismatch");
        for (int y : labels)
            if (y < 0 || y >= class_count) throw InputError("Dataset: label out of range");
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema"] = schema_header("dataset");
        j["name"] = name;
        j["class_count"] = class_count;
        j["seeds"] = {{"generator", generator_seed}};
        j["labels"] = labels;
        auto arr = nlohmann::json::array();
        for (const Graph& g : graphs) arr.push_back(g.to_json());
        j["graphs"] = std::move(arr);
        return j;
    }

    static Dataset from_json(const nlohmann::json& j, const std::string& source = "<json>") {
        check_schema(j, "dataset", source);
        Dataset d;
        d.name = j.at("name").get<std::string>();
        d.class_count = j.at("class_count").get<int>();
        d.generator_seed = j.at("seeds").value("generator", 0ULL);
        d.labels = j.at("labels").get<std::vector<int>>();
        for (const auto& gj : j.at("graphs")) d.graphs.push_back(Graph::from_json(gj));
        d.validate();
        return d;
    }
};

struct SplitSpec {
    double train = 0.8;
    double val = 0.1;
    double test = 0.1;
    std::uint64_t seed = 1234;

    void validate() const {
        for (double r : {train, val, test})
            if (r < 0.0 || r > 1.0) throw InputError("SplitSpec: ratio outside [0,1]");
        if (std::abs(train + val + test - 1.0) > 1e-9)
            throw InputError("SplitSpec: ratios must sum to 1");
    }
};

struct Split {
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;
};

inline Split split_dataset(const Dataset& d, const SplitSpec& spec) {
    spec.validate();
    int n = static_cast<int>(d.graphs.size());
    std::vector<int> indices(n);
    for (int i = 0; i < n; ++i) indices[i] = i;
    Rng rng(spec.seed);
    rng.shuffle(indices);
    int n_train = static_cast<int>(std::llround(spec.train * n));
    int n_val = static_cast<int>(std::llround(spec.val * n));
    if (n_train + n_val > n) n_val = n - n_train;
    Split s;
    s.train.assign(indices.begin(), indices.begin() + n_train);
    s.val.assign(indices.begin() + n_train, indices.begin() + n_train + n_val);
    s.test.assign(indices.begin() + n_train + n_val, indices.end());
    return s;
}

// ---------------------------------------------------------------------------
// Synthetic generators
// ---------------------------------------------------------------------------

// Preferential attachment: each new node draws `attach` distinct targets with
// probability proportional to degree (endpoint pool trick). attach=1 yields a
// uniformly grown tree, which is the base used by both synthetic datasets.
inline Graph generate_ba(int n, int attach, std::uint64_t seed) {
    if (attach < 1 || n <= attach)
        throw InputError("generate_ba: need n > attach >= 1, got n=" + std::to_string(n) +
                         " attach=" + std::to_string(attach));
    Rng rng(seed);
    std::vector<Edge> edges;
    std::vector<NodeId> pool;  // node id appears once per incident edge
    for (int i = 1; i < attach; ++i) {
        edges.emplace_back(i - 1, i);
        pool.push_back(i - 1);
        pool.push_back(i);
    }
    for (int v = attach; v < n; ++v) {
        std::set<NodeId> targets;
        while (static_cast<int>(targets.size()) < attach) {
            NodeId t = pool.empty() ? rng.uniform_int(0, v - 1)
                                    : pool[rng.next_below(pool.size())];
            targets.insert(t);
        }
        for (NodeId t : targets) {
            edges.emplace_back(t, v);
            pool.push_back(t);
            pool.push_back(v);
        }
    }
    return Graph(n, std::move(edges));
}

namespace motifs {

// All motif edge lists use local ids 0..size-1.
inline std::vector<Edge> cycle5() { return {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}}; }
inline constexpr int cycle5_size = 5;

// Square 0-1-2-3 with apex 4 on the 0-1 side.
inline std::vector<Edge> house() {
    return {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 4}, {1, 4}};
}
inline constexpr int house_size = 5;

inline std::vector<Edge> grid3x3() {
    std::vector<Edge> e;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            int id = 3 * r + c;
            if (c + 1 < 3) e.emplace_back(id, id + 1);
            if (r + 1 < 3) e.emplace_back(id, id + 3);
        }
    return e;
}
inline constexpr int grid_size = 9;

// Hub 0 plus a 6-cycle rim, all rim nodes spoked to the hub.
inline std::vector<Edge> wheel() {
    std::vector<Edge> e;
    for (int i = 1; i <= 6; ++i) {
        e.emplace_back(0, i);
        e.emplace_back(i, i == 6 ? 1 : i + 1);
    }
    return e;
}
inline constexpr int wheel_size = 7;

inline Graph as_graph(const std::vector<Edge>& edges, int size) {
    return Graph(size, std::vector<Edge>(edges), std::vector<int>(size, 0));
}

}  // namespace motifs

// Where a motif landed inside a generated graph; kept for structural tests
// and for checking recovered concepts against ground truth.
struct MotifPlacement {
    std::string kind;  // "cycle5" | "house" | "grid" | "wheel"
    int start = 0;     // first node id of the motif block
    int size = 0;
};

namespace detail {

inline const std::vector<Edge>& motif_edges(const std::string& kind) {
    static const std::vector<Edge> c5 = motifs::cycle5();
    static const std::vector<Edge> h = motifs::house();
    static const std::vector<Edge> g = motifs::grid3x3();
    static const std::vector<Edge> w = motifs::wheel();
    if (kind == "cycle5") return c5;
    if (kind == "house") return h;
    if (kind == "grid") return g;
    if (kind == "wheel") return w;
    throw InputError("unknown motif kind: " + kind);
}

inline int motif_size(const std::string& kind) {
    if (kind == "cycle5") return motifs::cycle5_size;
    if (kind == "house") return motifs::house_size;
    if (kind == "grid") return motifs::grid_size;
    if (kind == "wheel") return motifs::wheel_size;
    throw InputError("unknown motif kind: " + kind);
}

// Base graph + motif blocks, each tied to a uniform random base node by one
// bridge edge. Constant features so the network has to learn structure.
inline Graph assemble(int base_nodes, const std::vector<std::string>& kinds, Rng& rng,
                      std::vector<MotifPlacement>* placements) {
    std::vector<Edge> edges = generate_ba(base_nodes, 1, rng.next_u64()).edges();
    int next = base_nodes;
    for (const std::string& kind : kinds) {
        int size = motif_size(kind);
        for (const Edge& e : motif_edges(kind)) edges.emplace_back(e.u + next, e.v + next);
        NodeId motif_node = next + rng.uniform_int(0, size - 1);
        NodeId base_node = rng.uniform_int(0, base_nodes - 1);
        edges.emplace_back(motif_node, base_node);
        if (placements) placements->push_back({kind, next, size});
        next += size;
    }
    std::vector<std::vector<double>> features(next, std::vector<double>(10, 0.1));
    return Graph(next, std::move(edges), std::vector<int>(next, 0), std::move(features));
}

}  // namespace detail

// 25-node graphs: 20-node BA tree plus a 5-node motif on nodes 20..24.
// Class 0 carries the five-cycle, class 1 the house.
inline Dataset generate_ba2motifs(int count, std::uint64_t seed,
                                  std::vector<std::vector<MotifPlacement>>* manifest = nullptr) {
    if (count <= 0 || count % 2 != 0)
        throw InputError("generate_ba2motifs: count must be positive and even");
    Dataset d;
    d.name = "ba2motifs";
    d.class_count = 2;
    d.generator_seed = seed;
    for (int i = 0; i < count; ++i) {
        int label = i % 2;
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(i)));
        std::vector<MotifPlacement> placed;
        Graph g = detail::assemble(20, {label == 0 ? "cycle5" : "house"}, rng, &placed);
        d.graphs.push_back(std::move(g));
        d.labels.push_back(label);
        if (manifest) manifest->push_back(std::move(placed));
    }
    d.validate();
    return d;
}

// 40-node graphs over house/grid/wheel motifs. Class 1 carries exactly two of
// the three; class 0 cycles through plain BA, a single motif, and all three.
inline Dataset generate_bamultishapes(int count, std::uint64_t seed,
                                      std::vector<std::vector<MotifPlacement>>* manifest =
                                          nullptr) {
    if (count <= 0 || count % 2 != 0)
        throw InputError("generate_bamultishapes: count must be positive and even");
    static const std::vector<std::vector<std::string>> class1_pairs = {
        {"house", "grid"}, {"house", "wheel"}, {"grid", "wheel"}};
    static const std::vector<std::string> singles = {"house", "grid", "wheel"};
    Dataset d;
    d.name = "bamultishapes";
    d.class_count = 2;
    d.generator_seed = seed;
    for (int i = 0; i < count; ++i) {
        int label = i % 2;
        int variant = (i / 2) % 3;
        std::vector<std::string> kinds;
        if (label == 1) {
            kinds = class1_pairs[variant];
        } else {
            if (variant == 1) kinds = {singles[(i / 6) % 3]};
            if (variant == 2) kinds = {"house", "grid", "wheel"};
        }
        int motif_nodes = 0;
        for (const std::string& k : kinds) motif_nodes += detail::motif_size(k);
        Rng rng(Rng::derive(seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(i)));
        std::vector<MotifPlacement> placed;
        Graph g = detail::assemble(40 - motif_nodes, kinds, rng, &placed);
        d.graphs.push_back(std::move(g));
        d.labels.push_back(label);
        if (manifest) manifest->push_back(std::move(placed));
    }
    d.validate();
    return d;
}

// ---------------------------------------------------------------------------
// TU text format
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<long> read_int_lines(const std::string& path, bool required) {
    std::ifstream in(path);
    if (!in) {
        if (required) throw IoError("missing dataset file: " + path);
        return {};
    }
    std::vector<long> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(std::stol(line));
        } catch (const std::exception&) {
            throw ParseError(path + ": expected an integer", line_no);
        }
    }
    return out;
}

}  // namespace detail

// Loads <name>_A.txt / _graph_indicator.txt / _graph_labels.txt and the
// optional _node_labels.txt. Adjacency lines are "u, v" pairs of 1-based
// global node ids, listed in both orientations. Graph labels are normalized
// to 0..C-1; node labels are one-hot encoded into the feature vectors.
inline Dataset load_tu_dataset(const std::string& directory, const std::string& name) {
    const std::string prefix = directory + "/" + name + "/" + name + "_";
    const std::string prefix_flat = directory + "/" + name + "_";
    auto pick = [&](const std::string& suffix) {
        std::string nested = prefix + suffix;
        if (std::ifstream(nested).good()) return nested;
        return prefix_flat + suffix;
    };

    std::vector<long> indicator = detail::read_int_lines(pick("graph_indicator.txt"), true);
    std::vector<long> raw_graph_labels = detail::read_int_lines(pick("graph_labels.txt"), true);
    std::vector<long> raw_node_labels = detail::read_int_lines(pick("node_labels.txt"), false);

    long node_total = static_cast<long>(indicator.size());
    long graph_total = static_cast<long>(raw_graph_labels.size());
    if (graph_total == 0) throw ParseError(pick("graph_labels.txt") + ": no graphs");

    std::vector<int> local_id(node_total);
    std::vector<int> node_graph(node_total);
    std::vector<int> node_counts(graph_total, 0);
    for (long i = 0; i < node_total; ++i) {
        long gid = indicator[i];
        if (gid < 1 || gid > graph_total)
            throw ParseError(pick("graph_indicator.txt") + ": graph id " + std::to_string(gid) +
                                 " out of range",
                             i + 1);
        node_graph[i] = static_cast<int>(gid - 1);
        local_id[i] = node_counts[gid - 1]++;
    }

    if (!raw_node_labels.empty() && static_cast<long>(raw_node_labels.size()) != node_total)
        throw ParseError(pick("node_labels.txt") + ": line count differs from graph_indicator");

    // adjacency
    std::vector<std::vector<Edge>> edges(graph_total);
    {
        const std::string apath = pick("A.txt");
        std::ifstream in(apath);
        if (!in) throw IoError("missing dataset file: " + apath);
        std::string line;
        long line_no = 0;
        std::vector<std::set<Edge>> seen(graph_total);
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            long u = 0, v = 0;
            char comma = 0;
            std::istringstream ss(line);
            if (!(ss >> u >> comma >> v) || comma != ',')
                throw ParseError(apath + ": expected 'u, v'", line_no);
            if (u < 1 || u > node_total || v < 1 || v > node_total)
                throw ParseError(apath + ": node id out of range", line_no);
            if (node_graph[u - 1] != node_graph[v - 1])
                throw ParseError(apath + ": edge endpoints belong to different graphs", line_no);
            int gi = node_graph[u - 1];
            Edge e(local_id[u - 1], local_id[v - 1]);
            if (e.u == e.v) throw ParseError(apath + ": self-loop", line_no);
            if (seen[gi].insert(e).second) edges[gi].push_back(e);
        }
    }

    // normalize graph labels to 0..C-1 in sorted order of distinct raw values
    std::map<long, int> label_map;
    for (long y : raw_graph_labels) label_map.emplace(y, 0);
    int next_label = 0;
    for (auto& [raw, mapped] : label_map) mapped = next_label++;

    // one-hot node features from node labels when present
    std::map<long, int> node_label_map;
    for (long l : raw_node_labels) node_label_map.emplace(l, 0);
    int next_nl = 0;
    for (auto& [raw, mapped] : node_label_map) mapped = next_nl++;
    int feature_dim = raw_node_labels.empty() ? 10 : static_cast<int>(node_label_map.size());

    std::vector<std::vector<int>> labels(graph_total);
    std::vector<std::vector<std::vector<double>>> features(graph_total);
    for (long gi = 0; gi < graph_total; ++gi) {
        labels[gi].assign(node_counts[gi], 0);
        features[gi].assign(node_counts[gi], std::vector<double>(feature_dim, 0.1));
    }
    if (!raw_node_labels.empty()) {
        for (long i = 0; i < node_total; ++i) {
            int gi = node_graph[i];
            int mapped = node_label_map[raw_node_labels[i]];
            labels[gi][local_id[i]] = mapped;
            features[gi][local_id[i]].assign(feature_dim, 0.0);
            features[gi][local_id[i]][mapped] = 1.0;
        }
    }

    Dataset d;
    d.name = name;
    d.class_count = static_cast<int>(label_map.size());
    for (long gi = 0; gi < graph_total; ++gi) {
        d.graphs.emplace_back(node_counts[gi], std::move(edges[gi]), std::move(labels[gi]),
                              std::move(features[gi]));
        d.labels.push_back(label_map[raw_graph_labels[gi]]);
    }
    d.validate();
    return d;
}

}  // namespace treex
