#pragma once

#include <set>
#include <vector>

#include "treex/graph.hpp"

namespace treex {

// Full l-hop rooted subtree: breadth-layered expansion where every tree node
// spawns one child per neighbor of its original node, including the neighbor
// it was reached from. Repeats of an original node are distinct tree nodes,
// so the structure is cycle-free. Grows exponentially with depth; mining
// never materializes these (see subtree_edge_cover), they exist for the
// subtree-level operations and the analysis tests.
struct RootedSubtree {
    struct TreeNode {
        NodeId original;  // node in the source graph
        int parent;       // index into nodes, -1 for the root
        int layer;
    };

    NodeId root = 0;
    int depth = 0;
    std::vector<TreeNode> nodes;  // BFS order; nodes[0] is the root

    std::vector<std::vector<NodeId>> layers() const {
        std::vector<std::vector<NodeId>> out(depth + 1);
        for (const TreeNode& t : nodes) out[t.layer].push_back(t.original);
        return out;
    }

    // Parent->child links annotated with the original edge they instantiate.
    struct TreeEdge {
        int parent_node;
        int child_node;
        Edge original_edge;
    };

    std::vector<TreeEdge> tree_edges() const {
        std::vector<TreeEdge> out;
        out.reserve(nodes.size() > 0 ? nodes.size() - 1 : 0);
        for (int i = 1; i < static_cast<int>(nodes.size()); ++i)
            out.push_back({nodes[i].parent, i,
                           Edge(nodes[nodes[i].parent].original, nodes[i].original)});
        return out;
    }
};

inline RootedSubtree full_subtree(const Graph& g, NodeId root, int depth) {
    if (root < 0 || root >= g.node_count()) throw InputError("full_subtree: root out of range");
    if (depth < 0) throw InputError("full_subtree: negative depth");
    RootedSubtree t;
    t.root = root;
    t.depth = depth;
    t.nodes.push_back({root, -1, 0});
    std::size_t layer_begin = 0;
    std::size_t layer_end = 1;
    for (int l = 1; l <= depth; ++l) {
        for (std::size_t i = layer_begin; i < layer_end; ++i) {
            NodeId orig = t.nodes[i].original;
            for (NodeId nbr : g.neighbors(orig))  // ascending neighbor order
                t.nodes.push_back({nbr, static_cast<int>(i), l});
        }
        layer_begin = layer_end;
        layer_end = t.nodes.size();
    }
    return t;
}

// psi: the deduplicated set of original edges instantiated by the tree edges.
inline std::vector<Edge> subtree_edge_set(const RootedSubtree& t) {
    std::set<Edge> out;
    for (int i = 1; i < static_cast<int>(t.nodes.size()); ++i)
        out.insert(Edge(t.nodes[t.nodes[i].parent].original, t.nodes[i].original));
    return {out.begin(), out.end()};
}

// Same edge set as subtree_edge_set(full_subtree(g, root, depth)) but via a
// depth-limited BFS: an original edge appears in the depth-l subtree exactly
// when one of its endpoints is within l-1 hops of the root, since the
// shortest path to that endpoint is itself a valid expansion. O(V+E) instead
// of exponential tree growth.
inline std::vector<Edge> subtree_edge_cover(const Graph& g, NodeId root, int depth) {
    if (root < 0 || root >= g.node_count())
        throw InputError("subtree_edge_cover: root out of range");
    if (depth < 0) throw InputError("subtree_edge_cover: negative depth");
    std::vector<Edge> out;
    if (depth == 0) return out;
    std::vector<int> dist = bfs_distances(g, root);
    for (const Edge& e : g.edges()) {
        int du = dist[e.u];
        int dv = dist[e.v];
        bool covered = (du >= 0 && du <= depth - 1) || (dv >= 0 && dv <= depth - 1);
        if (covered) out.push_back(e);
    }
    return out;
}

}  // namespace treex
