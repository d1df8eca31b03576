#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "treex/dataset.hpp"
#include "treex/graph.hpp"
#include "treex/io.hpp"
#include "treex/linalg.hpp"
#include "treex/rng.hpp"

namespace treex {

struct GnnConfig {
    int layers = 3;
    int hidden_dim = 32;
    bool epsilon_learnable = false;
    double learning_rate = 0.01;
    int batch_size = 256;
    int epochs = 200;
    std::uint64_t seed = 0;
    std::string optimizer = "sgd";  // "sgd" | "adam"

    void validate() const {
        if (layers < 1) throw InputError("GnnConfig: need at least one layer");
        if (hidden_dim < 1) throw InputError("GnnConfig: hidden_dim must be positive");
        if (batch_size < 1) throw InputError("GnnConfig: batch_size must be positive");
        if (optimizer != "adam" && optimizer != "sgd")
            throw InputError("GnnConfig: unknown optimizer " + optimizer);
    }

    nlohmann::json to_json() const {
        return {{"layers", layers},         {"hidden_dim", hidden_dim},
                {"epsilon_learnable", epsilon_learnable},
                {"learning_rate", learning_rate}, {"batch_size", batch_size},
                {"epochs", epochs},         {"seed", seed},
                {"optimizer", optimizer}};
    }

    static GnnConfig from_json(const nlohmann::json& j) {
        GnnConfig c;
        c.layers = j.value("layers", 3);
        c.hidden_dim = j.value("hidden_dim", 32);
        c.epsilon_learnable = j.value("epsilon_learnable", false);
        c.learning_rate = j.value("learning_rate", 0.01);
        c.batch_size = j.value("batch_size", 256);
        c.epochs = j.value("epochs", 200);
        c.seed = j.value("seed", std::uint64_t{0});
        c.optimizer = j.value("optimizer", "sgd");
        return c;
    }
};

// Neighborhood aggregation used inside the message-passing update. Training
// always uses Sum; Mean and Max exist so tests can demonstrate what the
// non-injective aggregators collapse.
enum class Aggregator { Sum, Mean, Max };

// One message-passing layer: a 2-layer MLP (linear-ReLU-linear) applied to
// (1+epsilon) * h_v + aggregate of neighbor embeddings. The struct doubles as
// the gradient container since shapes match one to one.
struct GinLayer {
    Matrix w1;  // in x hidden
    Vec b1;
    Matrix w2;  // hidden x hidden
    Vec b2;
    double epsilon = 0.0;
};

struct TrainedGnn {
    GnnConfig config;
    int input_dim = 0;
    int class_count = 0;
    std::string dataset_name;
    std::vector<GinLayer> layers;
    Matrix cls_w;  // hidden x classes
    Vec cls_b;
    double best_val_accuracy = 0.0;

    std::uint64_t fingerprint() const {
        return json_fingerprint(nlohmann::json{{"config", config.to_json()},
                                               {"input_dim", input_dim},
                                               {"class_count", class_count},
                                               {"dataset", dataset_name}});
    }

    nlohmann::json to_json() const;
    static TrainedGnn from_json(const nlohmann::json& j, const std::string& source = "<json>");
};

// Per-layer node embeddings h[0..L] (h[0] = input features) plus the pre-MLP
// aggregates, which the expressiveness tests inspect directly.
struct EmbeddingTable {
    std::vector<Matrix> h;
    std::vector<Matrix> agg;  // agg[l-1] feeds layer l's MLP
};

struct ForwardResult {
    EmbeddingTable table;
    Vec graph_embedding;
    Vec logits;
};

namespace detail {

inline void aggregate_neighbors(const Graph& g, const Matrix& h, double epsilon,
                                Aggregator aggregator, Matrix& out) {
    int n = g.node_count();
    int dim = h.cols;
    out.rows = n;
    out.cols = dim;
    out.a.assign(static_cast<std::size_t>(n) * dim, 0.0);
    for (int v = 0; v < n; ++v) {
        double* row = out.row(v);
        const auto& nbrs = g.neighbors(v);
        switch (aggregator) {
            case Aggregator::Sum:
                for (NodeId u : nbrs) {
                    const double* hu = h.row(u);
                    for (int j = 0; j < dim; ++j) row[j] += hu[j];
                }
                break;
            case Aggregator::Mean:
                for (NodeId u : nbrs) {
                    const double* hu = h.row(u);
                    for (int j = 0; j < dim; ++j) row[j] += hu[j];
                }
                if (!nbrs.empty())
                    for (int j = 0; j < dim; ++j) row[j] /= static_cast<double>(nbrs.size());
                break;
            case Aggregator::Max:
                for (std::size_t i = 0; i < nbrs.size(); ++i) {
                    const double* hu = h.row(nbrs[i]);
                    for (int j = 0; j < dim; ++j)
                        row[j] = i == 0 ? hu[j] : std::max(row[j], hu[j]);
                }
                break;
        }
        const double* hv = h.row(v);
        for (int j = 0; j < dim; ++j) row[j] += (1.0 + epsilon) * hv[j];
    }
}

// Full forward pass keeping the intermediates needed for backprop.
struct Activations {
    std::vector<Matrix> h;    // h[0..L]
    std::vector<Matrix> agg;  // per layer
    std::vector<Matrix> z1;   // pre-ReLU
    std::vector<Matrix> r;    // post-ReLU
    Vec graph_embedding;
    Vec logits;
};

inline void forward_pass(const Graph& g, const TrainedGnn& model, Aggregator aggregator,
                         Activations& act) {
    if (!g.has_features() || g.feature_dim() != model.input_dim)
        throw InputError("gin_forward: feature dimension " + std::to_string(g.feature_dim()) +
                         " does not match model input " + std::to_string(model.input_dim));
    int n = g.node_count();
    if (n == 0) throw InputError("gin_forward: empty graph");
    int L = static_cast<int>(model.layers.size());
    act.h.resize(L + 1);
    act.agg.resize(L);
    act.z1.resize(L);
    act.r.resize(L);

    Matrix& x = act.h[0];
    x.rows = n;
    x.cols = model.input_dim;
    x.a.resize(static_cast<std::size_t>(n) * model.input_dim);
    for (int v = 0; v < n; ++v) {
        const auto& f = g.node_features()[v];
        std::copy(f.begin(), f.end(), x.row(v));
    }

    for (int l = 0; l < L; ++l) {
        const GinLayer& layer = model.layers[l];
        aggregate_neighbors(g, act.h[l], layer.epsilon, aggregator, act.agg[l]);
        matmul(act.agg[l], layer.w1, act.z1[l]);
        add_row_vector(act.z1[l], layer.b1);
        act.r[l] = act.z1[l];
        for (double& v : act.r[l].a) v = v > 0.0 ? v : 0.0;
        matmul(act.r[l], layer.w2, act.h[l + 1]);
        add_row_vector(act.h[l + 1], layer.b2);
    }

    // mean readout over last-layer embeddings
    const Matrix& hl = act.h[L];
    act.graph_embedding.assign(hl.cols, 0.0);
    for (int v = 0; v < n; ++v) {
        const double* row = hl.row(v);
        for (int j = 0; j < hl.cols; ++j) act.graph_embedding[j] += row[j];
    }
    for (double& v : act.graph_embedding) v /= static_cast<double>(n);

    act.logits.assign(model.class_count, 0.0);
    for (int c = 0; c < model.class_count; ++c) {
        double s = model.cls_b[c];
        for (int j = 0; j < model.cls_w.rows; ++j)
            s += model.cls_w(j, c) * act.graph_embedding[j];
        act.logits[c] = s;
    }
}

}  // namespace detail

inline ForwardResult gin_forward(const Graph& g, const TrainedGnn& model,
                                 Aggregator aggregator = Aggregator::Sum) {
    detail::Activations act;
    detail::forward_pass(g, model, aggregator, act);
    ForwardResult out;
    out.table.h = std::move(act.h);
    out.table.agg = std::move(act.agg);
    out.graph_embedding = std::move(act.graph_embedding);
    out.logits = std::move(act.logits);
    return out;
}

// The classifier module applied to an arbitrary embedding; affine only,
// softmax is taken by losses and metrics.
inline Vec classifier_apply(const Vec& embedding, const TrainedGnn& model) {
    if (static_cast<int>(embedding.size()) != model.cls_w.rows)
        throw InputError("classifier_apply: embedding dimension mismatch");
    Vec logits(model.class_count);
    for (int c = 0; c < model.class_count; ++c) {
        double s = model.cls_b[c];
        for (int j = 0; j < model.cls_w.rows; ++j) s += model.cls_w(j, c) * embedding[j];
        logits[c] = s;
    }
    return logits;
}

struct GinGradients {
    std::vector<GinLayer> layers;
    Matrix cls_w;
    Vec cls_b;

    static GinGradients zeros_like(const TrainedGnn& model) {
        GinGradients g;
        g.layers.resize(model.layers.size());
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            const GinLayer& src = model.layers[l];
            g.layers[l].w1 = Matrix(src.w1.rows, src.w1.cols);
            g.layers[l].b1.assign(src.b1.size(), 0.0);
            g.layers[l].w2 = Matrix(src.w2.rows, src.w2.cols);
            g.layers[l].b2.assign(src.b2.size(), 0.0);
            g.layers[l].epsilon = 0.0;
        }
        g.cls_w = Matrix(model.cls_w.rows, model.cls_w.cols);
        g.cls_b.assign(model.cls_b.size(), 0.0);
        return g;
    }
};

namespace detail {

// Cross-entropy loss for one graph; accumulates analytic parameter gradients.
// dlogits_override lets callers differentiate a single logit instead of the
// loss (used by the gradient-check tests on linear regimes).
inline double loss_and_grad(const Graph& g, int label, const TrainedGnn& model,
                            GinGradients& grads, Activations& act,
                            const Vec* dlogits_override = nullptr) {
    forward_pass(g, model, Aggregator::Sum, act);
    int n = g.node_count();
    int L = static_cast<int>(model.layers.size());

    double lse = log_sum_exp(act.logits);
    double loss = lse - act.logits[label];

    Vec dlogits(model.class_count);
    if (dlogits_override) {
        dlogits = *dlogits_override;
    } else {
        for (int c = 0; c < model.class_count; ++c)
            dlogits[c] = std::exp(act.logits[c] - lse) - (c == label ? 1.0 : 0.0);
    }

    // classifier
    Vec demb(model.cls_w.rows, 0.0);
    for (int c = 0; c < model.class_count; ++c) {
        grads.cls_b[c] += dlogits[c];
        for (int j = 0; j < model.cls_w.rows; ++j) {
            grads.cls_w(j, c) += act.graph_embedding[j] * dlogits[c];
            demb[j] += model.cls_w(j, c) * dlogits[c];
        }
    }

    // mean readout
    Matrix dh(n, model.layers.back().w2.cols);
    for (int v = 0; v < n; ++v) {
        double* row = dh.row(v);
        for (int j = 0; j < dh.cols; ++j) row[j] = demb[j] / static_cast<double>(n);
    }

    Matrix dr, dz1, ds, dh_prev, tmp;
    for (int l = L - 1; l >= 0; --l) {
        const GinLayer& layer = model.layers[l];
        GinLayer& grad = grads.layers[l];

        matmul_transA(act.r[l], dh, tmp);
        for (std::size_t i = 0; i < tmp.a.size(); ++i) grad.w2.a[i] += tmp.a[i];
        {
            Vec cs = column_sums(dh);
            for (std::size_t i = 0; i < cs.size(); ++i) grad.b2[i] += cs[i];
        }
        matmul_transB(dh, layer.w2, dr);
        dz1 = dr;
        for (std::size_t i = 0; i < dz1.a.size(); ++i)
            if (act.z1[l].a[i] <= 0.0) dz1.a[i] = 0.0;
        matmul_transA(act.agg[l], dz1, tmp);
        for (std::size_t i = 0; i < tmp.a.size(); ++i) grad.w1.a[i] += tmp.a[i];
        {
            Vec cs = column_sums(dz1);
            for (std::size_t i = 0; i < cs.size(); ++i) grad.b1[i] += cs[i];
        }
        matmul_transB(dz1, layer.w1, ds);

        if (model.config.epsilon_learnable) {
            double de = 0.0;
            for (int v = 0; v < n; ++v) {
                const double* hrow = act.h[l].row(v);
                const double* srow = ds.row(v);
                for (int j = 0; j < ds.cols; ++j) de += srow[j] * hrow[j];
            }
            grad.epsilon += de;
        }

        // h_v feeds its own aggregate (scaled) and every neighbor's sum
        dh_prev.rows = n;
        dh_prev.cols = ds.cols;
        dh_prev.a.assign(static_cast<std::size_t>(n) * ds.cols, 0.0);
        for (int v = 0; v < n; ++v) {
            double* out = dh_prev.row(v);
            const double* own = ds.row(v);
            for (int j = 0; j < ds.cols; ++j) out[j] += (1.0 + layer.epsilon) * own[j];
            for (NodeId u : g.neighbors(v)) {
                const double* nb = ds.row(u);
                for (int j = 0; j < ds.cols; ++j) out[j] += nb[j];
            }
        }
        dh = dh_prev;
    }
    return loss;
}

// Flat view over all trainable parameters, in a fixed traversal order.
inline std::vector<double*> parameter_view(TrainedGnn& model) {
    std::vector<double*> out;
    for (GinLayer& l : model.layers) {
        for (double& v : l.w1.a) out.push_back(&v);
        for (double& v : l.b1) out.push_back(&v);
        for (double& v : l.w2.a) out.push_back(&v);
        for (double& v : l.b2) out.push_back(&v);
        if (model.config.epsilon_learnable) out.push_back(&l.epsilon);
    }
    for (double& v : model.cls_w.a) out.push_back(&v);
    for (double& v : model.cls_b) out.push_back(&v);
    return out;
}

inline std::vector<const double*> gradient_view(const GinGradients& grads,
                                                bool epsilon_learnable) {
    std::vector<const double*> out;
    for (const GinLayer& l : grads.layers) {
        for (const double& v : l.w1.a) out.push_back(&v);
        for (const double& v : l.b1) out.push_back(&v);
        for (const double& v : l.w2.a) out.push_back(&v);
        for (const double& v : l.b2) out.push_back(&v);
        if (epsilon_learnable) out.push_back(&l.epsilon);
    }
    for (const double& v : grads.cls_w.a) out.push_back(&v);
    for (const double& v : grads.cls_b) out.push_back(&v);
    return out;
}

}  // namespace detail

inline TrainedGnn init_gin(int input_dim, int class_count, const GnnConfig& cfg,
                           const std::string& dataset_name = "") {
    cfg.validate();
    if (input_dim < 1) throw InputError("init_gin: input_dim must be positive");
    if (class_count < 2) throw InputError("init_gin: need at least two classes");
    TrainedGnn model;
    model.config = cfg;
    model.input_dim = input_dim;
    model.class_count = class_count;
    model.dataset_name = dataset_name;
    Rng rng(cfg.seed);
    auto he_fill = [&rng](Matrix& m, int fan_in) {
        double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
        for (double& v : m.a) v = scale * rng.next_normal();
    };
    // biases drawn uniform in +-1/sqrt(fan_in); a nonzero bias keeps
    // preactivations off the exact ReLU kink even when an input collapses
    auto bias_fill = [&rng](Vec& b, int fan_in) {
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (double& v : b) v = bound * (2.0 * rng.next_double() - 1.0);
    };
    int in = input_dim;
    model.layers.resize(cfg.layers);
    for (int l = 0; l < cfg.layers; ++l) {
        GinLayer& layer = model.layers[l];
        layer.w1 = Matrix(in, cfg.hidden_dim);
        he_fill(layer.w1, in);
        layer.b1.assign(cfg.hidden_dim, 0.0);
        bias_fill(layer.b1, in);
        layer.w2 = Matrix(cfg.hidden_dim, cfg.hidden_dim);
        he_fill(layer.w2, cfg.hidden_dim);
        layer.b2.assign(cfg.hidden_dim, 0.0);
        bias_fill(layer.b2, cfg.hidden_dim);
        layer.epsilon = 0.0;
        in = cfg.hidden_dim;
    }
    // zero-init classifier: first updates see near-uniform softmax, which
    // keeps early optimizer steps small
    model.cls_w = Matrix(cfg.hidden_dim, class_count);
    model.cls_b.assign(class_count, 0.0);
    return model;
}

inline int predict(const TrainedGnn& model, const Graph& g) {
    return argmax(gin_forward(g, model).logits);
}

inline double evaluate_accuracy(const TrainedGnn& model, const Dataset& d,
                                const std::vector<int>& indices) {
    if (indices.empty()) return 0.0;
    int correct = 0;
    for (int i : indices) correct += predict(model, d.graphs[i]) == d.labels[i];
    return static_cast<double>(correct) / static_cast<double>(indices.size());
}

// Mini-batch training with analytically derived gradients; gradients are
// averaged over the graphs of a batch and the final partial batch is kept.
// Returns the parameters that scored best on the validation split (training
// split when no validation indices are given).
inline TrainedGnn train_gin(const Dataset& d, const Split& split, const GnnConfig& cfg) {
    cfg.validate();
    if (split.train.empty()) throw InputError("train_gin: empty training split");
    int input_dim = d.graphs[split.train[0]].feature_dim();
    for (int i : split.train)
        if (d.graphs[i].feature_dim() != input_dim)
            throw InputError("train_gin: inconsistent feature dimensions");

    TrainedGnn model = init_gin(input_dim, d.class_count, cfg, d.name);
    std::vector<double*> params = detail::parameter_view(model);

    // Adam state (unused for sgd)
    std::vector<double> m1(params.size(), 0.0), m2(params.size(), 0.0);
    long step = 0;
    const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

    Rng rng(Rng::derive(cfg.seed, 0x7261696eULL));
    std::vector<int> order = split.train;
    double lr = cfg.learning_rate;
    const std::vector<int>& val = split.val.empty() ? split.train : split.val;

    TrainedGnn best = model;
    double best_acc = -1.0;

    detail::Activations act;
    GinGradients grads = GinGradients::zeros_like(model);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // step decay, halving every 50 epochs
        if (epoch > 0 && epoch % 50 == 0) lr *= 0.5;
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t end = std::min(order.size(), start + cfg.batch_size);
            grads = GinGradients::zeros_like(model);
            double batch_loss = 0.0;
            for (std::size_t i = start; i < end; ++i)
                batch_loss +=
                    detail::loss_and_grad(d.graphs[order[i]], d.labels[order[i]], model, grads, act);
            double inv = 1.0 / static_cast<double>(end - start);
            if (!std::isfinite(batch_loss))
                throw TrainError("train_gin: loss diverged", epoch);

            std::vector<const double*> gview =
                detail::gradient_view(grads, cfg.epsilon_learnable);
            ++step;
            if (cfg.optimizer == "adam") {
                double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
                double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
                for (std::size_t p = 0; p < params.size(); ++p) {
                    double gp = *gview[p] * inv;
                    m1[p] = beta1 * m1[p] + (1.0 - beta1) * gp;
                    m2[p] = beta2 * m2[p] + (1.0 - beta2) * gp * gp;
                    *params[p] -= lr * (m1[p] / bc1) /
                                  (std::sqrt(m2[p] / bc2) + adam_eps);
                }
            } else {
                for (std::size_t p = 0; p < params.size(); ++p)
                    *params[p] -= lr * (*gview[p] * inv);
            }
        }
        double acc = evaluate_accuracy(model, d, val);
        if (acc > best_acc) {
            best_acc = acc;
            best = model;
        }
    }
    best.best_val_accuracy = best_acc;
    return best;
}

// Central-difference check of the analytic gradients on a random coordinate
// subset; returns the worst relative error seen.
inline double grad_check(const TrainedGnn& model, const Graph& g, int label, int probes = 100,
                         std::uint64_t seed = 12345) {
    TrainedGnn work = model;
    GinGradients grads = GinGradients::zeros_like(work);
    detail::Activations act;
    detail::loss_and_grad(g, label, work, grads, act);
    std::vector<double*> params = detail::parameter_view(work);
    std::vector<const double*> gview = detail::gradient_view(grads, work.config.epsilon_learnable);

    Rng rng(seed);
    const double h = 1e-5;
    double worst = 0.0;
    GinGradients scratch = GinGradients::zeros_like(work);
    for (int probe = 0; probe < probes; ++probe) {
        std::size_t p = rng.next_below(params.size());
        double saved = *params[p];
        *params[p] = saved + h;
        double up = detail::loss_and_grad(g, label, work, scratch, act);
        *params[p] = saved - h;
        double down = detail::loss_and_grad(g, label, work, scratch, act);
        *params[p] = saved;
        double fd = (up - down) / (2.0 * h);
        double analytic = *gview[p];
        double denom = std::max({std::abs(fd), std::abs(analytic), 1e-8});
        worst = std::max(worst, std::abs(fd - analytic) / denom);
    }
    return worst;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
    return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.a}};
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
    m.a = j.at("data").get<std::vector<double>>();
    if (m.a.size() != static_cast<std::size_t>(m.rows) * m.cols)
        throw ParseError("matrix: data length does not match shape");
    return m;
}

inline nlohmann::json TrainedGnn::to_json() const {
    nlohmann::json j;
    j["schema"] = schema_header("checkpoint");
    j["config"] = config.to_json();
    j["input_dim"] = input_dim;
    j["class_count"] = class_count;
    j["dataset"] = dataset_name;
    j["seeds"] = {{"model", config.seed}};
    auto layer_arr = nlohmann::json::array();
    for (const GinLayer& l : layers)
        layer_arr.push_back({{"w1", matrix_to_json(l.w1)},
                             {"b1", l.b1},
                             {"w2", matrix_to_json(l.w2)},
                             {"b2", l.b2},
                             {"epsilon", l.epsilon}});
    j["layers"] = std::move(layer_arr);
    j["cls_w"] = matrix_to_json(cls_w);
    j["cls_b"] = cls_b;
    j["best_val_accuracy"] = best_val_accuracy;
    j["fingerprint"] = fingerprint();
    return j;
}

inline TrainedGnn TrainedGnn::from_json(const nlohmann::json& j, const std::string& source) {
    check_schema(j, "checkpoint", source);
    TrainedGnn m;
    m.config = GnnConfig::from_json(j.at("config"));
    m.input_dim = j.at("input_dim").get<int>();
    m.class_count = j.at("class_count").get<int>();
    m.dataset_name = j.value("dataset", "");
    for (const auto& lj : j.at("layers")) {
        GinLayer l;
        l.w1 = matrix_from_json(lj.at("w1"));
        l.b1 = lj.at("b1").get<Vec>();
        l.w2 = matrix_from_json(lj.at("w2"));
        l.b2 = lj.at("b2").get<Vec>();
        l.epsilon = lj.value("epsilon", 0.0);
        m.layers.push_back(std::move(l));
    }
    m.cls_w = matrix_from_json(j.at("cls_w"));
    m.cls_b = j.at("cls_b").get<Vec>();
    m.best_val_accuracy = j.value("best_val_accuracy", 0.0);
    return m;
}

}  // namespace treex
