#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "treex/subtree.hpp"
#include "treex/wl.hpp"

#include "oracles.hpp"

using namespace treex;

namespace {

Graph cycle(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return Graph(n, std::move(edges));
}

}  // namespace

TEST_CASE("wl_refine basics") {
    SECTION("single node keeps one color forever") {
        WlColoring c = wl_refine(Graph(1, {}), 4);
        for (int t = 0; t <= 4; ++t) CHECK(c.color_count(t) == 1);
    }
    SECTION("C4 symmetry means one color at every iteration") {
        WlColoring c = wl_refine(cycle(4), 3);
        for (int t = 0; t <= 3; ++t) CHECK(c.color_count(t) == 1);
    }
    SECTION("P3 splits endpoints from the center after one round") {
        WlColoring c = wl_refine(Graph(3, {{0, 1}, {1, 2}}), 1);
        CHECK(c.color_count(0) == 1);
        CHECK(c.color_count(1) == 2);
        CHECK(c.colors[1][0] == c.colors[1][2]);
        CHECK(c.colors[1][0] != c.colors[1][1]);
    }
    SECTION("round zero respects node labels") {
        WlColoring c = wl_refine(Graph(2, {{0, 1}}, {3, 4}), 0);
        CHECK(c.colors[0][0] != c.colors[0][1]);
    }
    SECTION("color count never decreases") {
        Rng rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            Graph g = oracle::random_graph(rng, 8, 0.4, 2);
            WlColoring c = wl_refine(g, 4);
            for (int t = 1; t <= 4; ++t) CHECK(c.color_count(t) >= c.color_count(t - 1));
        }
    }
}

TEST_CASE("wl_isomorphic") {
    Graph tri(3, {{0, 1}, {1, 2}, {0, 2}});
    Graph p3(3, {{0, 1}, {1, 2}});
    SECTION("reflexive") { CHECK(wl_isomorphic(tri, tri, 3)); }
    SECTION("triangle vs path differ") {
        CHECK_FALSE(wl_isomorphic(tri, p3, 1));
    }
    SECTION("relabeled cycles are equivalent") {
        Rng rng(5);
        Graph c5 = cycle(5);
        Graph permuted = oracle::permute_graph(c5, oracle::random_permutation(5, rng));
        CHECK(wl_isomorphic(c5, permuted, 3));
    }
    SECTION("symmetric and permutation invariant") {
        Rng rng(17);
        for (int trial = 0; trial < 25; ++trial) {
            Graph a = oracle::random_graph(rng, 7, 0.4, 2);
            Graph b = oracle::random_graph(rng, 7, 0.4, 2);
            CHECK(wl_isomorphic(a, b, 3) == wl_isomorphic(b, a, 3));
            Graph pa = oracle::permute_graph(a, oracle::random_permutation(a.node_count(), rng));
            CHECK(wl_isomorphic(a, pa, 3));
            CHECK(wl_isomorphic(pa, b, 3) == wl_isomorphic(a, b, 3));
        }
    }
    SECTION("different node counts never match") {
        CHECK_FALSE(wl_isomorphic(cycle(4), cycle(5), 3));
    }
}

TEST_CASE("wl_hash") {
    Graph tri(3, {{0, 1}, {1, 2}, {0, 2}});
    Graph p3(3, {{0, 1}, {1, 2}});
    SECTION("dim below 8 is rejected") { CHECK_THROWS_AS(wl_hash(tri, 2, 4), InputError); }
    SECTION("identical graphs hash identically, length is dim") {
        auto h1 = wl_hash(tri, 3, 16);
        auto h2 = wl_hash(tri, 3, 16);
        CHECK(h1.size() == 16);
        CHECK(h1 == h2);
    }
    SECTION("permuted graphs hash identically") {
        Rng rng(23);
        for (int trial = 0; trial < 20; ++trial) {
            Graph g = oracle::random_graph(rng, 8, 0.4, 3);
            Graph pg = oracle::permute_graph(g, oracle::random_permutation(g.node_count(), rng));
            CHECK(wl_hash(g, 3, 16) == wl_hash(pg, 3, 16));
        }
    }
    SECTION("triangle and path hash differently") {
        // sanity: wl_refine already separates them
        CHECK_FALSE(wl_isomorphic(tri, p3, 2));
        CHECK(wl_hash(tri, 2, 16) != wl_hash(p3, 2, 16));
    }
    SECTION("signature agrees with the equivalence test") {
        Rng rng(29);
        for (int trial = 0; trial < 30; ++trial) {
            Graph a = oracle::random_graph(rng, 6, 0.5, 2);
            Graph b = oracle::random_graph(rng, 6, 0.5, 2);
            if (wl_isomorphic(a, b, 3)) CHECK(wl_signature(a, 3) == wl_signature(b, 3));
        }
    }
}

// Depth-l WL colors coincide exactly with canonical forms of the full l-hop
// subtrees; the small-scale version of the acceptance property suite.
TEST_CASE("wl colors match subtree canonical forms") {
    Rng rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        Graph g = oracle::random_graph(rng, 8, 0.4, 2);
        WlColoring c = wl_refine(g, 3);
        for (int depth = 1; depth <= 3; ++depth) {
            std::vector<std::string> forms(g.node_count());
            for (NodeId v = 0; v < g.node_count(); ++v)
                forms[v] = oracle::canonical_subtree_form(g, v, depth);
            for (NodeId u = 0; u < g.node_count(); ++u)
                for (NodeId v = u + 1; v < g.node_count(); ++v) {
                    bool same_color = c.colors[depth][u] == c.colors[depth][v];
                    bool same_form = forms[u] == forms[v];
                    CHECK(same_color == same_form);
                }
        }
    }
}
