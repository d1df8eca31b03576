#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "treex/gin.hpp"
#include "treex/wl.hpp"

#include "oracles.hpp"

using namespace treex;

namespace {

GnnConfig small_config(int layers = 2, int hidden = 8, std::uint64_t seed = 5) {
    GnnConfig cfg;
    cfg.layers = layers;
    cfg.hidden_dim = hidden;
    cfg.seed = seed;
    return cfg;
}

Graph with_constant_features(Graph g, int dim = 4) {
    std::vector<std::vector<double>> f(g.node_count(), std::vector<double>(dim, 0.1));
    return Graph(g.node_count(), g.edges(), g.node_labels(), std::move(f));
}

Graph random_featured_graph(Rng& rng, int max_nodes, int dim) {
    Graph g = oracle::random_graph(rng, max_nodes, 0.5, 3);
    std::vector<std::vector<double>> f(g.node_count(), std::vector<double>(dim));
    for (auto& row : f)
        for (double& x : row) x = rng.next_double() - 0.5;
    return Graph(g.node_count(), g.edges(), g.node_labels(), std::move(f));
}

}  // namespace

TEST_CASE("gin_forward on an isolated node is just the MLP") {
    TrainedGnn model = init_gin(3, 2, small_config(1, 4));
    Graph g(1, {}, {0}, {{0.2, -0.3, 0.5}});
    ForwardResult fr = gin_forward(g, model);

    const GinLayer& layer = model.layers[0];
    Vec z1(4), h1(4);
    for (int j = 0; j < 4; ++j) {
        double s = layer.b1[j];
        for (int i = 0; i < 3; ++i) s += g.node_features()[0][i] * layer.w1(i, j);
        z1[j] = std::max(0.0, s);
    }
    for (int j = 0; j < 4; ++j) {
        double s = layer.b2[j];
        for (int i = 0; i < 4; ++i) s += z1[i] * layer.w2(i, j);
        h1[j] = s;
    }
    for (int j = 0; j < 4; ++j)
        CHECK(fr.table.h[1](0, j) == Catch::Approx(h1[j]).margin(1e-12));
}

TEST_CASE("gin_forward symmetry and dimension checks") {
    TrainedGnn model = init_gin(4, 2, small_config());
    SECTION("K2 with identical features keeps both rows equal at every layer") {
        Graph g = with_constant_features(Graph(2, {{0, 1}}, {0, 0}));
        ForwardResult fr = gin_forward(g, model);
        for (const Matrix& h : fr.table.h)
            for (int j = 0; j < h.cols; ++j) CHECK(h(0, j) == h(1, j));
    }
    SECTION("feature dimension mismatch is an input error") {
        Graph g = with_constant_features(Graph(2, {{0, 1}}, {0, 0}), 7);
        CHECK_THROWS_AS(gin_forward(g, model), InputError);
    }
    SECTION("isomorphic graphs produce identical logits") {
        Rng rng(21);
        for (int trial = 0; trial < 15; ++trial) {
            Graph g = random_featured_graph(rng, 7, 4);
            Graph pg = oracle::permute_graph(g, oracle::random_permutation(g.node_count(), rng));
            Vec a = gin_forward(g, model).logits;
            Vec b = gin_forward(pg, model).logits;
            for (std::size_t c = 0; c < a.size(); ++c)
                CHECK(a[c] == Catch::Approx(b[c]).margin(1e-9));
        }
    }
}

TEST_CASE("classifier_apply") {
    TrainedGnn model = init_gin(4, 3, small_config());
    SECTION("zero embedding returns the bias") {
        model.cls_b = {0.4, -0.2, 0.1};
        Vec logits = classifier_apply(Vec(model.config.hidden_dim, 0.0), model);
        CHECK(logits == model.cls_b);
    }
    SECTION("linear in the embedding with zero bias") {
        model.cls_b.assign(3, 0.0);
        Vec e(model.config.hidden_dim);
        Rng rng(2);
        for (double& x : e) x = rng.next_double();
        Vec e2(e);
        for (double& x : e2) x *= 2.0;
        Vec l1 = classifier_apply(e, model);
        Vec l2 = classifier_apply(e2, model);
        for (std::size_t c = 0; c < l1.size(); ++c)
            CHECK(l2[c] == Catch::Approx(2.0 * l1[c]).margin(1e-12));
    }
    SECTION("consistent with gin_forward") {
        Rng rng(3);
        Graph g = random_featured_graph(rng, 6, 4);
        ForwardResult fr = gin_forward(g, model);
        CHECK(classifier_apply(fr.graph_embedding, model) == fr.logits);
    }
    SECTION("dimension mismatch is an input error") {
        CHECK_THROWS_AS(classifier_apply(Vec(3, 0.0), model), InputError);
    }
}

TEST_CASE("mean readout ignores graph duplication") {
    TrainedGnn model = init_gin(4, 2, small_config());
    Rng rng(9);
    Graph g = random_featured_graph(rng, 6, 4);
    Graph doubled = disjoint_union(g, g);
    Vec a = gin_forward(g, model).graph_embedding;
    Vec b = gin_forward(doubled, model).graph_embedding;
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == Catch::Approx(b[j]).margin(1e-12));
}

TEST_CASE("toy training memorizes two graphs") {
    Dataset toy;
    toy.name = "toy";
    toy.class_count = 2;
    toy.graphs.push_back(with_constant_features(Graph(3, {{0, 1}, {1, 2}, {0, 2}})));
    toy.graphs.push_back(with_constant_features(Graph(3, {{0, 1}, {1, 2}})));
    toy.labels = {0, 1};

    GnnConfig cfg = small_config(2, 8, 3);
    cfg.epochs = 200;
    cfg.learning_rate = 0.01;
    Split split{{0, 1}, {}, {}};
    TrainedGnn model = train_gin(toy, split, cfg);
    CHECK(evaluate_accuracy(model, toy, split.train) == 1.0);
}

TEST_CASE("training reports divergence with the epoch index") {
    Dataset bad;
    bad.name = "bad";
    bad.class_count = 2;
    // features near DBL_MAX overflow the forward pass into inf/NaN
    std::vector<std::vector<double>> f = {{1e308, 1e308}, {-1e308, 1e308}};
    bad.graphs.push_back(Graph(2, {{0, 1}}, {0, 0}, std::move(f)));
    bad.labels = {0};
    GnnConfig cfg = small_config(2, 4);
    cfg.epochs = 3;
    try {
        train_gin(bad, Split{{0}, {}, {}}, cfg);
        FAIL("expected TrainError");
    } catch (const TrainError& e) {
        CHECK(e.epoch_index == 0);
    }
}

TEST_CASE("grad_check stays within tolerance") {
    Rng rng(33);
    SECTION("random graphs and parameters") {
        for (int trial = 0; trial < 3; ++trial) {
            Graph g = random_featured_graph(rng, 7, 4);
            TrainedGnn model = init_gin(4, 2, small_config(2, 6, 100 + trial));
            CHECK(grad_check(model, g, trial % 2, 100, trial) < 1e-4);
        }
    }
    SECTION("dead ReLU paths agree at zero") {
        TrainedGnn model = init_gin(4, 2, small_config(1, 4));
        model.layers[0].b1.assign(4, -1e6);  // kills every ReLU
        Graph g = with_constant_features(Graph(2, {{0, 1}}, {0, 0}));
        GinGradients grads = GinGradients::zeros_like(model);
        detail::Activations act;
        detail::loss_and_grad(g, 0, model, grads, act);
        for (double v : grads.layers[0].w1.a) CHECK(v == 0.0);
        CHECK(grad_check(model, g, 0, 60, 1) < 1e-4);
    }
}

// In a regime where every ReLU is active, each logit is affine in any single
// parameter, so a central difference recovers the analytic derivative to
// rounding error.
TEST_CASE("gradients are exact in the linear regime") {
    TrainedGnn model = init_gin(3, 2, small_config(2, 5, 8));
    for (GinLayer& l : model.layers) {
        for (double& v : l.w1.a) v = std::abs(v) + 0.01;
        for (double& v : l.w2.a) v = std::abs(v) + 0.01;
        l.b1.assign(l.b1.size(), 0.5);
    }
    Graph g(3, {{0, 1}, {1, 2}}, {0, 0, 0}, {{0.3, 0.2, 0.1}, {0.4, 0.1, 0.2}, {0.1, 0.5, 0.3}});

    GinGradients grads = GinGradients::zeros_like(model);
    detail::Activations act;
    Vec pick_logit0 = {1.0, 0.0};
    detail::loss_and_grad(g, 0, model, grads, act, &pick_logit0);

    std::vector<double*> params = detail::parameter_view(model);
    std::vector<const double*> gview = detail::gradient_view(grads, false);
    Rng rng(4);
    const double h = 1e-4;
    for (int probe = 0; probe < 60; ++probe) {
        std::size_t p = rng.next_below(params.size());
        double saved = *params[p];
        *params[p] = saved + h;
        double up = gin_forward(g, model).logits[0];
        *params[p] = saved - h;
        double down = gin_forward(g, model).logits[0];
        *params[p] = saved;
        double fd = (up - down) / (2.0 * h);
        CHECK(std::abs(fd - *gview[p]) <= 1e-8 * std::max(1.0, std::abs(*gview[p])));
    }
}

// Injective-aggregation surrogate: replace the sum+MLP with interning of
// (own id, sorted neighbor ids). Embedding equality under this surrogate must
// coincide with WL color equality at the same depth.
TEST_CASE("injective surrogate embeddings match WL colors") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        Graph g = oracle::random_graph(rng, 8, 0.4, 2);
        int L = 3;
        std::vector<std::vector<int>> e(L + 1, std::vector<int>(g.node_count()));
        for (int v = 0; v < g.node_count(); ++v) e[0][v] = g.label(v);
        for (int l = 1; l <= L; ++l) {
            std::map<std::pair<int, std::vector<int>>, int> intern;
            for (int v = 0; v < g.node_count(); ++v) {
                std::vector<int> nbrs;
                for (NodeId u : g.neighbors(v)) nbrs.push_back(e[l - 1][u]);
                std::sort(nbrs.begin(), nbrs.end());
                auto [it, fresh] = intern.try_emplace({e[l - 1][v], std::move(nbrs)},
                                                      static_cast<int>(intern.size()));
                e[l][v] = it->second;
            }
        }
        WlColoring wl = wl_refine(g, L);
        for (int l = 0; l <= L; ++l)
            for (int u = 0; u < g.node_count(); ++u)
                for (int v = u + 1; v < g.node_count(); ++v)
                    CHECK((e[l][u] == e[l][v]) == (wl.colors[l][u] == wl.colors[l][v]));
    }
}

// Mean aggregation collapses neighbor multisets with equal distributions; max
// collapses equal supports. The sum keeps them apart.
TEST_CASE("non-injective aggregators collapse constructed pairs") {
    TrainedGnn model = init_gin(2, 2, small_config(1, 4));
    auto star = [](const std::vector<std::vector<double>>& leaf_features) {
        int n = 1 + static_cast<int>(leaf_features.size());
        std::vector<Edge> edges;
        std::vector<std::vector<double>> f = {{1.0, 1.0}};
        for (int i = 1; i < n; ++i) {
            edges.emplace_back(0, i);
            f.push_back(leaf_features[i - 1]);
        }
        return Graph(n, std::move(edges), std::vector<int>(n, 0), std::move(f));
    };
    const std::vector<double> p = {2.0, 0.0}, q = {0.0, 2.0};

    SECTION("mean: {p,p} vs {p,p,p} at the center") {
        Graph a = star({p, p});
        Graph b = star({p, p, p});
        Matrix agg_a = gin_forward(a, model, Aggregator::Mean).table.agg[0];
        Matrix agg_b = gin_forward(b, model, Aggregator::Mean).table.agg[0];
        for (int j = 0; j < agg_a.cols; ++j) CHECK(agg_a(0, j) == agg_b(0, j));
        Matrix sum_a = gin_forward(a, model, Aggregator::Sum).table.agg[0];
        Matrix sum_b = gin_forward(b, model, Aggregator::Sum).table.agg[0];
        bool differs = false;
        for (int j = 0; j < sum_a.cols; ++j) differs |= sum_a(0, j) != sum_b(0, j);
        CHECK(differs);
    }
    SECTION("max: {p,q} vs {p,p,q} at the center") {
        Graph a = star({p, q});
        Graph b = star({p, p, q});
        Matrix agg_a = gin_forward(a, model, Aggregator::Max).table.agg[0];
        Matrix agg_b = gin_forward(b, model, Aggregator::Max).table.agg[0];
        for (int j = 0; j < agg_a.cols; ++j) CHECK(agg_a(0, j) == agg_b(0, j));
        Matrix sum_a = gin_forward(a, model, Aggregator::Sum).table.agg[0];
        Matrix sum_b = gin_forward(b, model, Aggregator::Sum).table.agg[0];
        bool differs = false;
        for (int j = 0; j < sum_a.cols; ++j) differs |= sum_a(0, j) != sum_b(0, j);
        CHECK(differs);
    }
}

TEST_CASE("checkpoint round-trip") {
    TrainedGnn model = init_gin(4, 2, small_config());
    Rng rng(6);
    Graph g = random_featured_graph(rng, 6, 4);
    nlohmann::json j = model.to_json();
    TrainedGnn back = TrainedGnn::from_json(j);
    CHECK(gin_forward(g, back).logits == gin_forward(g, model).logits);

    nlohmann::json wrong = j;
    wrong["schema"]["kind"] = "dataset";
    CHECK_THROWS_AS(TrainedGnn::from_json(wrong), IncompatibilityError);
}
