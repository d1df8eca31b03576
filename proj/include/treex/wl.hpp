#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "treex/graph.hpp"

namespace treex {

// 1-dimensional Weisfeiler-Lehman color refinement.
//
// colors[t][v] is the color of v after t rounds. Round 0 depends only on the
// node label (or on a hash of the feature vector when labels are absent);
// round t interns the pair (previous color, sorted multiset of neighbor
// colors). Color ids are dense and assigned in first-appearance order over
// nodes, so the result is deterministic for a given input.
struct WlColoring {
    int iterations = 0;
    std::vector<std::vector<int>> colors;

    int color_count(int iteration) const {
        int mx = -1;
        for (int c : colors[iteration]) mx = std::max(mx, c);
        return mx + 1;
    }
};

namespace detail {

inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a_u64(std::uint64_t v, std::uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a(&v, sizeof(v), h);
}

// Initial color key per node: the label when the graph is labeled, otherwise
// a content hash of the feature vector.
inline std::uint64_t initial_color_key(const Graph& g, NodeId v) {
    if (g.has_labels()) return static_cast<std::uint64_t>(g.node_labels()[v]) + 1;
    if (g.has_features()) {
        const auto& f = g.node_features()[v];
        return fnv1a(f.data(), f.size() * sizeof(double));
    }
    return 0;
}

}  // namespace detail

// Refine several graphs against one shared color table, so color ids are
// directly comparable across them (disjoint-union semantics).
inline std::vector<WlColoring> wl_refine_joint(const std::vector<const Graph*>& graphs,
                                               int iterations) {
    if (iterations < 0) throw InputError("wl_refine: negative iteration count");
    std::vector<WlColoring> out(graphs.size());
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        out[gi].iterations = iterations;
        out[gi].colors.assign(iterations + 1, {});
    }

    std::map<std::uint64_t, int> init_table;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        const Graph& g = *graphs[gi];
        auto& c0 = out[gi].colors[0];
        c0.resize(g.node_count());
        for (NodeId v = 0; v < g.node_count(); ++v) {
            std::uint64_t key = detail::initial_color_key(g, v);
            auto [it, inserted] = init_table.try_emplace(key, static_cast<int>(init_table.size()));
            c0[v] = it->second;
        }
    }

    for (int t = 1; t <= iterations; ++t) {
        std::map<std::vector<int>, int> table;
        for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
            const Graph& g = *graphs[gi];
            const auto& prev = out[gi].colors[t - 1];
            auto& cur = out[gi].colors[t];
            cur.resize(g.node_count());
            for (NodeId v = 0; v < g.node_count(); ++v) {
                std::vector<int> key;
                key.reserve(g.degree(v) + 1);
                key.push_back(prev[v]);
                for (NodeId u : g.neighbors(v)) key.push_back(prev[u]);
                std::sort(key.begin() + 1, key.end());
                auto [it, inserted] = table.try_emplace(std::move(key),
                                                        static_cast<int>(table.size()));
                cur[v] = it->second;
            }
        }
    }
    return out;
}

inline WlColoring wl_refine(const Graph& g, int iterations) {
    return wl_refine_joint({&g}, iterations)[0];
}

// WL equivalence test: equal node counts and equal multisets of final colors
// under a shared color table. Graphs that pass may still be non-isomorphic;
// WL-distinguishable graphs never pass.
inline bool wl_isomorphic(const Graph& a, const Graph& b, int iterations) {
    if (iterations < 1) throw InputError("wl_isomorphic: needs at least 1 iteration");
    if (a.node_count() != b.node_count()) return false;
    auto refined = wl_refine_joint({&a, &b}, iterations);
    std::vector<int> ca = refined[0].colors[iterations];
    std::vector<int> cb = refined[1].colors[iterations];
    std::sort(ca.begin(), ca.end());
    std::sort(cb.begin(), cb.end());
    return ca == cb;
}

// Content-hash colors: like wl_refine but the color identity is a 64-bit
// digest of the refinement history, so it is invariant under node relabeling
// and shared across graphs without a joint table.
inline std::vector<std::uint64_t> wl_content_colors(const Graph& g, int iterations) {
    std::vector<std::uint64_t> cur(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v)
        cur[v] = detail::fnv1a_u64(detail::initial_color_key(g, v));
    for (int t = 1; t <= iterations; ++t) {
        std::vector<std::uint64_t> next(g.node_count());
        for (NodeId v = 0; v < g.node_count(); ++v) {
            std::vector<std::uint64_t> nbr;
            nbr.reserve(g.degree(v));
            for (NodeId u : g.neighbors(v)) nbr.push_back(cur[u]);
            std::sort(nbr.begin(), nbr.end());
            std::uint64_t h = detail::fnv1a_u64(cur[v]);
            for (std::uint64_t x : nbr) h = detail::fnv1a_u64(x, h);
            next[v] = h;
        }
        cur = std::move(next);
    }
    return cur;
}

// Single 64-bit WL signature of a whole graph (node count + sorted final
// content colors). Equal for WL-equivalent graphs; used to group candidates
// before merging.
inline std::uint64_t wl_signature(const Graph& g, int iterations) {
    std::vector<std::uint64_t> colors = wl_content_colors(g, iterations);
    std::sort(colors.begin(), colors.end());
    std::uint64_t h = detail::fnv1a_u64(static_cast<std::uint64_t>(g.node_count()));
    for (std::uint64_t c : colors) h = detail::fnv1a_u64(c, h);
    return h;
}

// Hash model: fixed-length real vector from the sorted multiset of final WL
// colors. Feature-hashing layout: each color increments one signed bucket, so
// WL-equivalent graphs map to bit-identical vectors.
inline std::vector<double> wl_hash(const Graph& g, int iterations, int dim) {
    if (dim < 8) throw InputError("wl_hash: dim must be at least 8");
    std::vector<double> out(dim, 0.0);
    for (std::uint64_t c : wl_content_colors(g, iterations)) {
        std::uint64_t bucket = c % static_cast<std::uint64_t>(dim);
        double sign = ((c >> 37) & 1) ? 1.0 : -1.0;
        out[bucket] += sign;
    }
    return out;
}

}  // namespace treex
