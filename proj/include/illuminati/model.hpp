#ifndef ILLUMINATI_MODEL_HPP
#define ILLUMINATI_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "linalg.hpp"

namespace illuminati {

enum class Activation { relu, identity };

inline std::string_view to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

inline Activation parse_activation(std::string_view name)
{
    if (name == "relu") return Activation::relu;
    if (name == "identity") return Activation::identity;
    throw Error(ErrorCode::unsupported_activation, std::string(name));
}

/// Affine map followed by an activation; weight is in_dim x out_dim.
struct DenseLayer {
    Matrix weight;
    Vector bias;
    Activation activation = Activation::relu;

    [[nodiscard]] std::size_t in_dim() const { return static_cast<std::size_t>(weight.rows()); }
    [[nodiscard]] std::size_t out_dim() const { return static_cast<std::size_t>(weight.cols()); }
};

/// GCN stack, max/mean concat readout, dense head.
struct GnnModel {
    std::size_t attr_dim = 0;
    std::size_t num_classes = 2;
    std::vector<DenseLayer> gcn_layers;
    std::vector<DenseLayer> head_layers;

    [[nodiscard]] std::size_t embedding_dim() const
    {
        return gcn_layers.empty() ? attr_dim : gcn_layers.back().out_dim();
    }

    /// Throws ShapeMismatch unless the layer dimensions chain correctly.
    void validate() const
    {
        auto fail = [](const std::string& what) { throw Error(ErrorCode::shape_mismatch, what); };
        if (num_classes < 2) fail("num_classes must be >= 2");
        if (head_layers.empty()) fail("model has no head layers");
        std::size_t dim = attr_dim;
        auto check = [&](const DenseLayer& layer, const std::string& name) {
            if (layer.in_dim() != dim) {
                fail(name + " expects input " + std::to_string(layer.in_dim()) + ", got " + std::to_string(dim));
            }
            if (static_cast<std::size_t>(layer.bias.size()) != layer.out_dim()) fail(name + " bias size");
            if (!layer.weight.allFinite() || !layer.bias.allFinite()) fail(name + " has non-finite weights");
            dim = layer.out_dim();
        };
        for (std::size_t l = 0; l < gcn_layers.size(); ++l) check(gcn_layers[l], "gcn layer " + std::to_string(l));
        dim *= 2;
        for (std::size_t l = 0; l < head_layers.size(); ++l) check(head_layers[l], "head layer " + std::to_string(l));
        if (dim != num_classes) fail("head output " + std::to_string(dim) + " != num_classes");
    }
};

/// Symmetric GCN normalization with injected self-loops:
/// arc (j -> i) carries gate * s_j * s_i and node i keeps s_i^2, where
/// s_i = (1 + sum of gates on arcs into i)^(-1/2).
struct NormalizedAdjacency {
    Vector inv_sqrt_degree;
    Vector arc_coefficient;
    Vector self_coefficient;
};

inline NormalizedAdjacency normalize_adjacency(const AttributedGraph& g, const Vector* edge_gate = nullptr)
{
    const auto n = static_cast<Eigen::Index>(g.node_count());
    const auto& arcs = g.arcs();
    Vector degree = Vector::Ones(n);
    for (std::size_t a = 0; a < arcs.size(); ++a) {
        degree[static_cast<Eigen::Index>(arcs[a].dst)] += edge_gate ? (*edge_gate)[static_cast<Eigen::Index>(a)] : 1.0;
    }
    NormalizedAdjacency norm;
    norm.inv_sqrt_degree = degree.array().rsqrt();
    norm.self_coefficient = norm.inv_sqrt_degree.array().square();
    norm.arc_coefficient.resize(static_cast<Eigen::Index>(arcs.size()));
    for (std::size_t a = 0; a < arcs.size(); ++a) {
        const double gate = edge_gate ? (*edge_gate)[static_cast<Eigen::Index>(a)] : 1.0;
        norm.arc_coefficient[static_cast<Eigen::Index>(a)] =
            gate * norm.inv_sqrt_degree[static_cast<Eigen::Index>(arcs[a].src)] *
            norm.inv_sqrt_degree[static_cast<Eigen::Index>(arcs[a].dst)];
    }
    return norm;
}

/// Gates on arcs and input attributes, each in [0, 1].
struct MaskedInput {
    Vector edge_gate;
    Matrix attribute_gate;

    static MaskedInput ones(const AttributedGraph& g)
    {
        return {Vector::Ones(static_cast<Eigen::Index>(g.arc_count())),
                Matrix::Ones(static_cast<Eigen::Index>(g.node_count()), static_cast<Eigen::Index>(g.attr_dim()))};
    }
};

struct ForwardResult {
    Vector logits;
    Vector probabilities;
    std::size_t predicted_class = 0;
};

/// Intermediate values kept for the backward pass.
struct ForwardTrace {
    NormalizedAdjacency norm;
    Vector edge_gate;
    Matrix attribute_gate;
    std::vector<Matrix> layer_input;     // H^(l) fed into gcn layer l
    std::vector<Matrix> layer_projected; // H^(l) W^(l)
    std::vector<Matrix> layer_pre;       // pre-activation
    Matrix embeddings;
    std::vector<Eigen::Index> max_source; // node holding the max per channel (-1 when empty)
    std::vector<Vector> head_input;
    std::vector<Vector> head_pre;
    ForwardResult result;
};

namespace detail {

template <typename Derived>
void apply_activation(Activation act, Eigen::MatrixBase<Derived>& m)
{
    if (act == Activation::relu) m = m.cwiseMax(0.0);
}

inline Vector softmax(const Vector& logits)
{
    const double top = logits.maxCoeff();
    Vector e = (logits.array() - top).exp();
    return e / e.sum();
}

inline std::size_t argmax(const Vector& v)
{
    std::size_t best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        if (v[i] > v[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
    }
    return best;
}

inline void check_compatible(const GnnModel& model, const AttributedGraph& g)
{
    if (g.attr_dim() != model.attr_dim && !(g.node_count() == 0)) {
        throw Error(ErrorCode::shape_mismatch, "graph attr_dim " + std::to_string(g.attr_dim()) +
                                                   " != model attr_dim " + std::to_string(model.attr_dim));
    }
}

inline void check_mask(const AttributedGraph& g, const MaskedInput& mask)
{
    if (static_cast<std::size_t>(mask.edge_gate.size()) != g.arc_count()) {
        throw Error(ErrorCode::shape_mismatch, "edge gate length " + std::to_string(mask.edge_gate.size()) +
                                                   " != arc count " + std::to_string(g.arc_count()));
    }
    if (static_cast<std::size_t>(mask.attribute_gate.rows()) != g.node_count() ||
        static_cast<std::size_t>(mask.attribute_gate.cols()) != g.attr_dim()) {
        throw Error(ErrorCode::shape_mismatch, "attribute gate shape");
    }
}

} // namespace detail

/// Forward pass keeping every intermediate needed by backward().
/// Gates are clamped to [0, 1]; an absent mask means all gates are 1.
inline ForwardTrace forward_trace(const GnnModel& model, const AttributedGraph& g,
                                  const MaskedInput* mask = nullptr)
{
    detail::check_compatible(model, g);
    const auto n = static_cast<Eigen::Index>(g.node_count());
    const auto& arcs = g.arcs();

    ForwardTrace t;
    if (mask) {
        detail::check_mask(g, *mask);
        t.edge_gate = mask->edge_gate.cwiseMax(0.0).cwiseMin(1.0);
        t.attribute_gate = mask->attribute_gate.cwiseMax(0.0).cwiseMin(1.0);
    } else {
        t.edge_gate = Vector::Ones(static_cast<Eigen::Index>(arcs.size()));
        t.attribute_gate = Matrix::Ones(n, static_cast<Eigen::Index>(model.attr_dim));
    }
    t.norm = normalize_adjacency(g, &t.edge_gate);

    Matrix h = n == 0 ? Matrix(0, static_cast<Eigen::Index>(model.attr_dim))
                      : Matrix(g.attributes().cwiseProduct(t.attribute_gate));
    for (const auto& layer : model.gcn_layers) {
        t.layer_input.push_back(h);
        Matrix projected = h * layer.weight;
        Matrix z = layer.bias.transpose().replicate(n, 1);
        for (std::size_t a = 0; a < arcs.size(); ++a) {
            z.row(static_cast<Eigen::Index>(arcs[a].dst)) +=
                t.norm.arc_coefficient[static_cast<Eigen::Index>(a)] * projected.row(static_cast<Eigen::Index>(arcs[a].src));
        }
        for (Eigen::Index i = 0; i < n; ++i) z.row(i) += t.norm.self_coefficient[i] * projected.row(i);
        t.layer_projected.push_back(std::move(projected));
        t.layer_pre.push_back(z);
        detail::apply_activation(layer.activation, z);
        h = std::move(z);
    }
    t.embeddings = h;

    // Readout: [max over nodes, mean over nodes]; zeros for an empty node set.
    const auto f = h.cols();
    Vector readout = Vector::Zero(2 * f);
    t.max_source.assign(static_cast<std::size_t>(f), -1);
    if (n > 0) {
        for (Eigen::Index c = 0; c < f; ++c) {
            Eigen::Index best = 0;
            for (Eigen::Index i = 1; i < n; ++i) {
                if (h(i, c) > h(best, c)) best = i;
            }
            t.max_source[static_cast<std::size_t>(c)] = best;
            readout[c] = h(best, c);
            readout[f + c] = h.col(c).sum() / static_cast<double>(n);
        }
    }

    Vector x = std::move(readout);
    for (const auto& layer : model.head_layers) {
        t.head_input.push_back(x);
        Vector z = layer.weight.transpose() * x + layer.bias;
        t.head_pre.push_back(z);
        detail::apply_activation(layer.activation, z);
        x = std::move(z);
    }
    t.result.logits = x;
    t.result.probabilities = detail::softmax(x);
    t.result.predicted_class = detail::argmax(x);
    return t;
}

inline ForwardResult forward(const GnnModel& model, const AttributedGraph& g, const MaskedInput* mask = nullptr)
{
    return forward_trace(model, g, mask).result;
}

inline ForwardResult forward(const GnnModel& model, const AttributedGraph& g, const MaskedInput& mask)
{
    return forward_trace(model, g, &mask).result;
}

inline constexpr double probability_floor = 1e-12;

inline double cross_entropy(const Vector& probabilities, std::size_t target_class)
{
    if (target_class >= static_cast<std::size_t>(probabilities.size())) {
        throw Error(ErrorCode::index_out_of_range, "target class " + std::to_string(target_class));
    }
    return -std::log(std::max(probabilities[static_cast<Eigen::Index>(target_class)], probability_floor));
}

inline double loss(const GnnModel& model, const AttributedGraph& g, const MaskedInput* mask, std::size_t target_class)
{
    return cross_entropy(forward(model, g, mask).probabilities, target_class);
}

struct LayerGradient {
    Matrix weight;
    Vector bias;
};

struct ModelGradient {
    std::vector<LayerGradient> gcn_layers;
    std::vector<LayerGradient> head_layers;
};

struct MaskGradient {
    Vector edge_gate;
    Matrix attribute_gate;
};

struct BackwardResult {
    std::optional<ModelGradient> model;
    std::optional<MaskGradient> mask;
};

/// Gradient of cross-entropy toward target_class with respect to the logits.
inline Vector cross_entropy_logit_gradient(const Vector& probabilities, std::size_t target_class)
{
    const auto t = static_cast<Eigen::Index>(target_class);
    Vector d = probabilities;
    if (probabilities[t] < probability_floor) return Vector::Zero(d.size()); // floor active: flat
    d[t] -= 1.0;
    return d;
}

/// Reverse-mode pass from dL/dlogits. ReLU derivative at exactly 0 is 0;
/// max-pool routes to the first node attaining the max.
inline BackwardResult backward(const GnnModel& model, const AttributedGraph& g, const ForwardTrace& t,
                               const Vector& d_logits, bool want_model, bool want_mask)
{
    const auto n = static_cast<Eigen::Index>(g.node_count());
    const auto& arcs = g.arcs();
    BackwardResult out;
    if (want_model) {
        out.model.emplace();
        out.model->gcn_layers.resize(model.gcn_layers.size());
        out.model->head_layers.resize(model.head_layers.size());
    }

    Vector dx = d_logits;
    for (std::size_t l = model.head_layers.size(); l-- > 0;) {
        const auto& layer = model.head_layers[l];
        Vector dz = dx;
        if (layer.activation == Activation::relu) dz = (t.head_pre[l].array() > 0.0).select(dz, 0.0);
        if (want_model) {
            out.model->head_layers[l].weight = t.head_input[l] * dz.transpose();
            out.model->head_layers[l].bias = dz;
        }
        dx = layer.weight * dz;
    }

    const auto f = t.embeddings.cols();
    Matrix dh = Matrix::Zero(n, f);
    if (n > 0) {
        for (Eigen::Index c = 0; c < f; ++c) {
            dh(t.max_source[static_cast<std::size_t>(c)], c) += dx[c];
            dh.col(c).array() += dx[f + c] / static_cast<double>(n);
        }
    }

    Vector d_arc_coef = Vector::Zero(static_cast<Eigen::Index>(arcs.size()));
    Vector d_self_coef = Vector::Zero(n);
    for (std::size_t l = model.gcn_layers.size(); l-- > 0;) {
        const auto& layer = model.gcn_layers[l];
        Matrix dz = dh;
        if (layer.activation == Activation::relu) dz = (t.layer_pre[l].array() > 0.0).select(dz, 0.0);
        const Matrix& projected = t.layer_projected[l];
        Matrix dp = Matrix::Zero(n, dz.cols());
        for (Eigen::Index i = 0; i < n; ++i) dp.row(i) += t.norm.self_coefficient[i] * dz.row(i);
        for (std::size_t a = 0; a < arcs.size(); ++a) {
            const auto s = static_cast<Eigen::Index>(arcs[a].src);
            const auto d = static_cast<Eigen::Index>(arcs[a].dst);
            dp.row(s) += t.norm.arc_coefficient[static_cast<Eigen::Index>(a)] * dz.row(d);
        }
        if (want_mask) {
            for (std::size_t a = 0; a < arcs.size(); ++a) {
                d_arc_coef[static_cast<Eigen::Index>(a)] +=
                    dz.row(static_cast<Eigen::Index>(arcs[a].dst)).dot(projected.row(static_cast<Eigen::Index>(arcs[a].src)));
            }
            for (Eigen::Index i = 0; i < n; ++i) d_self_coef[i] += dz.row(i).dot(projected.row(i));
        }
        if (want_model) {
            out.model->gcn_layers[l].weight = t.layer_input[l].transpose() * dp;
            out.model->gcn_layers[l].bias = dz.colwise().sum().transpose();
        }
        dh = dp * layer.weight.transpose();
    }

    if (want_mask) {
        // Chain through arc_coef = gate * s_src * s_dst, self = s_i^2,
        // s_i = (1 + sum gates into i)^(-1/2).
        const Vector& s = t.norm.inv_sqrt_degree;
        Vector d_gate = Vector::Zero(static_cast<Eigen::Index>(arcs.size()));
        Vector ds = 2.0 * s.cwiseProduct(d_self_coef);
        for (std::size_t a = 0; a < arcs.size(); ++a) {
            const auto ai = static_cast<Eigen::Index>(a);
            const auto src = static_cast<Eigen::Index>(arcs[a].src);
            const auto dst = static_cast<Eigen::Index>(arcs[a].dst);
            d_gate[ai] += d_arc_coef[ai] * s[src] * s[dst];
            ds[src] += d_arc_coef[ai] * t.edge_gate[ai] * s[dst];
            ds[dst] += d_arc_coef[ai] * t.edge_gate[ai] * s[src];
        }
        for (std::size_t a = 0; a < arcs.size(); ++a) {
            const auto dst = static_cast<Eigen::Index>(arcs[a].dst);
            d_gate[static_cast<Eigen::Index>(a)] += ds[dst] * (-0.5 * s[dst] * s[dst] * s[dst]);
        }
        out.mask.emplace();
        out.mask->edge_gate = std::move(d_gate);
        out.mask->attribute_gate = n == 0 ? Matrix(0, static_cast<Eigen::Index>(model.attr_dim))
                                          : Matrix(dh.cwiseProduct(g.attributes()));
    }
    return out;
}

/// Exact derivatives of loss() with respect to the gate values, model fixed.
inline MaskGradient mask_gradients(const GnnModel& model, const AttributedGraph& g, const MaskedInput& mask,
                                   std::size_t target_class)
{
    const auto trace = forward_trace(model, g, &mask);
    const Vector d_logits = cross_entropy_logit_gradient(trace.result.probabilities, target_class);
    return *backward(model, g, trace, d_logits, false, true).mask;
}

/// The zero-node graph: readout is all zeros, so this is the head on zeros.
inline AttributedGraph empty_graph(std::size_t attr_dim)
{
    return build_graph(0, {}, Matrix(0, static_cast<Eigen::Index>(attr_dim)), Directedness::undirected);
}

} // namespace illuminati

#endif // ILLUMINATI_MODEL_HPP
