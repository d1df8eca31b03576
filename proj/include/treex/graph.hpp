#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "treex/errors.hpp"

namespace treex {

using NodeId = int;

// Undirected edge, stored canonically with u < v so that counting and set
// operations never see the same edge under two orientations.
struct Edge {
    NodeId u;
    NodeId v;

    Edge(NodeId a, NodeId b) : u(std::min(a, b)), v(std::max(a, b)) {}

    friend bool operator==(const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v; }
    friend bool operator<(const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    }
};

// Immutable undirected graph with integer node labels and dense per-node
// feature vectors. All invariants are checked at construction; afterwards the
// object is safe to share across threads.
class Graph {
public:
    Graph() = default;

    Graph(int node_count, std::vector<Edge> edges, std::vector<int> node_labels = {},
          std::vector<std::vector<double>> node_features = {})
        : node_count_(node_count),
          edges_(std::move(edges)),
          node_labels_(std::move(node_labels)),
          node_features_(std::move(node_features)) {
        if (node_count_ < 0) throw InputError("Graph: negative node count");
        std::sort(edges_.begin(), edges_.end());
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const Edge& e = edges_[i];
            if (e.u == e.v) throw InputError("Graph: self-loop at node " + std::to_string(e.u));
            if (e.u < 0 || e.v >= node_count_)
                throw InputError("Graph: edge endpoint out of range: (" + std::to_string(e.u) +
                                 "," + std::to_string(e.v) + ")");
            if (i > 0 && edges_[i - 1] == e)
                throw InputError("Graph: duplicate edge (" + std::to_string(e.u) + "," +
                                 std::to_string(e.v) + ")");
        }
        if (!node_labels_.empty() && static_cast<int>(node_labels_.size()) != node_count_)
            throw InputError("Graph: node_labels size != node count");
        if (!node_features_.empty()) {
            if (static_cast<int>(node_features_.size()) != node_count_)
                throw InputError("Graph: node_features size != node count");
            for (const auto& f : node_features_)
                if (f.size() != node_features_[0].size())
                    throw InputError("Graph: node feature dimensions differ");
        }
        adjacency_.assign(node_count_, {});
        for (const Edge& e : edges_) {
            adjacency_[e.u].push_back(e.v);
            adjacency_[e.v].push_back(e.u);
        }
        for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
    }

    int node_count() const { return node_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<NodeId>& neighbors(NodeId v) const { return adjacency_[v]; }
    int degree(NodeId v) const { return static_cast<int>(adjacency_[v].size()); }

    bool has_labels() const { return !node_labels_.empty(); }
    const std::vector<int>& node_labels() const { return node_labels_; }
    int label(NodeId v) const { return node_labels_.empty() ? 0 : node_labels_[v]; }

    bool has_features() const { return !node_features_.empty(); }
    const std::vector<std::vector<double>>& node_features() const { return node_features_; }
    int feature_dim() const {
        return node_features_.empty() ? 0 : static_cast<int>(node_features_[0].size());
    }

    bool has_edge(const Edge& e) const {
        return std::binary_search(edges_.begin(), edges_.end(), e);
    }

    // Index of a canonical edge within edges(); -1 when absent.
    int edge_index(const Edge& e) const {
        auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
        if (it == edges_.end() || !(*it == e)) return -1;
        return static_cast<int>(it - edges_.begin());
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["n"] = node_count_;
        auto edges = nlohmann::json::array();
        for (const Edge& e : edges_) edges.push_back({e.u, e.v});
        j["edges"] = std::move(edges);
        j["node_labels"] = node_labels_;
        j["node_features"] = node_features_;
        return j;
    }

    static Graph from_json(const nlohmann::json& j) {
        int n = j.at("n").get<int>();
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw ParseError("graph json: malformed edge");
            edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        std::vector<int> labels = j.value("node_labels", std::vector<int>{});
        std::vector<std::vector<double>> features =
            j.value("node_features", std::vector<std::vector<double>>{});
        return Graph(n, std::move(edges), std::move(labels), std::move(features));
    }

    std::string to_dot(const std::string& name = "g") const {
        std::ostringstream os;
        os << "graph " << name << " {\n";
        for (int v = 0; v < node_count_; ++v)
            os << "  n" << v << " [label=\"" << label(v) << "\"];\n";
        for (const Edge& e : edges_) os << "  n" << e.u << " -- n" << e.v << ";\n";
        os << "}\n";
        return os.str();
    }

private:
    int node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<int> node_labels_;
    std::vector<std::vector<double>> node_features_;
    std::vector<std::vector<NodeId>> adjacency_;
};

// Result of inducing a subgraph from an edge set: ids are remapped compactly,
// original_ids[i] recovers the source node of compact node i.
struct InducedSubgraph {
    Graph graph;
    std::vector<NodeId> original_ids;
};

inline InducedSubgraph edge_induced_subgraph(const Graph& g, const std::vector<Edge>& edge_set) {
    std::set<Edge> unique(edge_set.begin(), edge_set.end());
    std::set<NodeId> nodes;
    for (const Edge& e : unique) {
        if (!g.has_edge(e))
            throw InputError("edge_induced_subgraph: edge (" + std::to_string(e.u) + "," +
                             std::to_string(e.v) + ") not in graph");
        nodes.insert(e.u);
        nodes.insert(e.v);
    }
    std::vector<NodeId> original(nodes.begin(), nodes.end());
    std::vector<int> remap(g.node_count(), -1);
    for (std::size_t i = 0; i < original.size(); ++i) remap[original[i]] = static_cast<int>(i);

    std::vector<Edge> edges;
    edges.reserve(unique.size());
    for (const Edge& e : unique) edges.emplace_back(remap[e.u], remap[e.v]);

    std::vector<int> labels;
    std::vector<std::vector<double>> features;
    if (g.has_labels()) {
        labels.reserve(original.size());
        for (NodeId v : original) labels.push_back(g.node_labels()[v]);
    }
    if (g.has_features()) {
        features.reserve(original.size());
        for (NodeId v : original) features.push_back(g.node_features()[v]);
    }
    return InducedSubgraph{
        Graph(static_cast<int>(original.size()), std::move(edges), std::move(labels),
              std::move(features)),
        std::move(original)};
}

// BFS distances from a source; unreachable nodes get -1.
inline std::vector<int> bfs_distances(const Graph& g, NodeId source) {
    if (source < 0 || source >= g.node_count())
        throw InputError("bfs_distances: source out of range");
    std::vector<int> dist(g.node_count(), -1);
    std::vector<NodeId> queue{source};
    dist[source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        NodeId v = queue[head];
        for (NodeId u : g.neighbors(v)) {
            if (dist[u] < 0) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    return dist;
}

// Disjoint union; labels/features are kept only if both operands carry them.
inline Graph disjoint_union(const Graph& a, const Graph& b) {
    std::vector<Edge> edges = a.edges();
    for (const Edge& e : b.edges()) edges.emplace_back(e.u + a.node_count(), e.v + a.node_count());
    std::vector<int> labels;
    if (a.has_labels() && b.has_labels()) {
        labels = a.node_labels();
        labels.insert(labels.end(), b.node_labels().begin(), b.node_labels().end());
    }
    std::vector<std::vector<double>> features;
    if (a.has_features() && b.has_features() && a.feature_dim() == b.feature_dim()) {
        features = a.node_features();
        features.insert(features.end(), b.node_features().begin(), b.node_features().end());
    }
    return Graph(a.node_count() + b.node_count(), std::move(edges), std::move(labels),
                 std::move(features));
}

}  // namespace treex
