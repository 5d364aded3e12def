#ifndef ILLUMINATI_EXPLAINER_HPP
#define ILLUMINATI_EXPLAINER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "hard_concrete.hpp"
#include "model.hpp"
#include "optimizer.hpp"
#include "random.hpp"

namespace illuminati {

enum class Aggregation { max, mean, min };
enum class ExplainMode { full, edge_only, attribute_only };
enum class EdgeSharing { independent, undirected_pair };
enum class AttributeSharing { independent, per_node, global };

/// Which mask entries are tied to one learnable logit.
struct SharingMode {
    EdgeSharing edges = EdgeSharing::independent;
    AttributeSharing attributes = AttributeSharing::independent;

    friend bool operator==(const SharingMode&, const SharingMode&) = default;
};

inline std::string_view to_string(Aggregation a)
{
    switch (a) {
    case Aggregation::max: return "max";
    case Aggregation::mean: return "mean";
    case Aggregation::min: return "min";
    }
    return "max";
}

inline Aggregation parse_aggregation(std::string_view s)
{
    if (s == "max") return Aggregation::max;
    if (s == "mean") return Aggregation::mean;
    if (s == "min") return Aggregation::min;
    throw Error(ErrorCode::validation_error, "unknown aggregation " + std::string(s));
}

inline std::string_view to_string(ExplainMode m)
{
    switch (m) {
    case ExplainMode::full: return "full";
    case ExplainMode::edge_only: return "edge_only";
    case ExplainMode::attribute_only: return "attribute_only";
    }
    return "full";
}

inline ExplainMode parse_mode(std::string_view s)
{
    if (s == "full") return ExplainMode::full;
    if (s == "edge_only") return ExplainMode::edge_only;
    if (s == "attribute_only") return ExplainMode::attribute_only;
    throw Error(ErrorCode::validation_error, "unknown mode " + std::string(s));
}

inline std::string_view to_string(EdgeSharing s) { return s == EdgeSharing::independent ? "independent" : "undirected_pair"; }

inline EdgeSharing parse_edge_sharing(std::string_view s)
{
    if (s == "independent") return EdgeSharing::independent;
    if (s == "undirected_pair" || s == "undirected_pair_shared") return EdgeSharing::undirected_pair;
    throw Error(ErrorCode::validation_error, "unknown edge sharing " + std::string(s));
}

inline std::string_view to_string(AttributeSharing s)
{
    switch (s) {
    case AttributeSharing::independent: return "independent";
    case AttributeSharing::per_node: return "per_node";
    case AttributeSharing::global: return "global";
    }
    return "independent";
}

inline AttributeSharing parse_attribute_sharing(std::string_view s)
{
    if (s == "independent") return AttributeSharing::independent;
    if (s == "per_node" || s == "per_node_attr_shared") return AttributeSharing::per_node;
    if (s == "global" || s == "global_attr_shared") return AttributeSharing::global;
    throw Error(ErrorCode::validation_error, "unknown attribute sharing " + std::string(s));
}

struct ExplainConfig {
    std::size_t epochs = 300;
    double learning_rate = 0.01;
    double lambda_edge_size = 0.005;
    double lambda_attr_size = 0.05;
    double lambda_edge_entropy = 1.0;
    double lambda_attr_entropy = 0.1;
    double init_std = 0.1;
    Aggregation agg1 = Aggregation::max;
    Aggregation agg2 = Aggregation::max;
    Aggregation pair_agg = Aggregation::mean;
    ExplainMode mode = ExplainMode::full;
    SharingMode sharing{};
    HardConcreteConfig hard_concrete{};

    void validate() const
    {
        if (epochs < 1) throw Error(ErrorCode::validation_error, "epochs must be >= 1");
        if (!(learning_rate > 0.0)) throw Error(ErrorCode::validation_error, "learning_rate must be > 0");
        for (double l : {lambda_edge_size, lambda_attr_size, lambda_edge_entropy, lambda_attr_entropy}) {
            if (!(l >= 0.0)) throw Error(ErrorCode::validation_error, "regularizer weights must be >= 0");
        }
        hard_concrete.validate();
    }

    /// Sharing actually used: attribute-only explanations learn one
    /// attribute logit per node.
    [[nodiscard]] SharingMode effective_sharing() const
    {
        SharingMode s = sharing;
        if (mode == ExplainMode::attribute_only) s.attributes = AttributeSharing::per_node;
        return s;
    }
};

/// Learnable pre-sigmoid logits plus the map from every arc and every
/// (node, attribute) entry to the parameter that backs it. A frozen side
/// has no parameters and a constant gate of 1.
struct MaskSet {
    SharingMode sharing;
    Vector edge_logits;
    std::vector<std::size_t> arc_param;
    Vector attr_logits;
    std::vector<std::size_t> attr_param; // row-major over node_count x attr_dim
    bool edges_frozen = false;
    bool attributes_frozen = false;
};

namespace detail {

inline void bind_parameters(MaskSet& masks, const AttributedGraph& g)
{
    const std::size_t n = g.node_count();
    const std::size_t d = g.attr_dim();
    std::size_t edge_params = 0;
    masks.arc_param.assign(g.arc_count(), 0);
    if (!masks.edges_frozen) {
        const bool paired = masks.sharing.edges == EdgeSharing::undirected_pair && g.is_undirected();
        for (std::size_t a = 0; a < g.arc_count(); ++a) masks.arc_param[a] = paired ? a / 2 : a;
        edge_params = paired ? g.arc_count() / 2 : g.arc_count();
    }
    std::size_t attr_params = 0;
    masks.attr_param.assign(n * d, 0);
    if (!masks.attributes_frozen) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < d; ++t) {
                std::size_t p = i * d + t;
                if (masks.sharing.attributes == AttributeSharing::per_node) p = i;
                if (masks.sharing.attributes == AttributeSharing::global) p = t;
                masks.attr_param[i * d + t] = p;
            }
        }
        switch (masks.sharing.attributes) {
        case AttributeSharing::independent: attr_params = n * d; break;
        case AttributeSharing::per_node: attr_params = n; break;
        case AttributeSharing::global: attr_params = d; break;
        }
    }
    masks.edge_logits = Vector::Zero(static_cast<Eigen::Index>(edge_params));
    masks.attr_logits = Vector::Zero(static_cast<Eigen::Index>(attr_params));
}

} // namespace detail

/// Logits drawn i.i.d. from normal(0, init_std), edge parameters first.
inline MaskSet init_masks(const AttributedGraph& g, const ExplainConfig& config, std::uint64_t seed)
{
    MaskSet masks;
    masks.sharing = config.effective_sharing();
    masks.edges_frozen = config.mode == ExplainMode::attribute_only;
    masks.attributes_frozen = config.mode == ExplainMode::edge_only;
    detail::bind_parameters(masks, g);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, config.init_std);
    for (Eigen::Index p = 0; p < masks.edge_logits.size(); ++p) masks.edge_logits[p] = normal(rng);
    for (Eigen::Index p = 0; p < masks.attr_logits.size(); ++p) masks.attr_logits[p] = normal(rng);
    return masks;
}

/// Per-arc, per-attribute and per-node importance scores, all in [0, 1].
struct Explanation {
    std::string graph_id;
    std::vector<double> edge_score;
    Matrix attr_score;
    std::vector<double> node_attr_score;
    std::vector<double> node_score;
    std::vector<std::size_t> node_ranking;
    std::size_t original_prediction = 0;
    double original_probability = 0.0;
};

inline double aggregate(std::span<const double> values, Aggregation agg)
{
    if (values.empty()) throw Error(ErrorCode::validation_error, "aggregate over an empty set");
    switch (agg) {
    case Aggregation::max: return *std::max_element(values.begin(), values.end());
    case Aggregation::min: return *std::min_element(values.begin(), values.end());
    case Aggregation::mean: return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    }
    return 0.0;
}

/// Replaces both arc scores of every undirected edge with their aggregate.
inline std::vector<double> pair_aggregate_edge_scores(std::span<const double> edge_score, const AttributedGraph& g,
                                                      Aggregation pair_agg)
{
    if (!g.is_undirected()) throw Error(ErrorCode::not_undirected, "pair aggregation needs an undirected graph");
    if (edge_score.size() != g.arc_count()) throw Error(ErrorCode::shape_mismatch, "edge score length");
    std::vector<double> out(edge_score.begin(), edge_score.end());
    for (std::size_t a = 0; a + 1 < out.size(); a += 2) {
        const double pair[2] = {edge_score[a], edge_score[a + 1]};
        out[a] = out[a + 1] = aggregate(pair, pair_agg);
    }
    return out;
}

inline constexpr double attribute_score_floor = 1e-12;

/// Geometric mean of a node's attribute scores, zeros floored first. With
/// per-node sharing every entry equals the shared score, which is returned
/// as is.
inline double node_attr_importance(std::span<const double> attr_scores, bool per_node_shared = false)
{
    if (attr_scores.empty()) return 1.0;
    if (per_node_shared) return attr_scores.front();
    double log_sum = 0.0;
    for (double s : attr_scores) log_sum += std::log(std::max(s, attribute_score_floor));
    return std::exp(log_sum / static_cast<double>(attr_scores.size()));
}

/// Importance of the message carried by an arc: arc score times the
/// source node's attribute importance.
inline double message_importance(double arc_score, double source_attr_importance)
{
    return arc_score * source_attr_importance;
}

/// Node scores from outgoing and incoming message importances. A side with
/// no arcs is left out of agg2; an isolated node falls back to its
/// attribute importance.
inline std::vector<double> node_importance(const AttributedGraph& g, std::span<const double> message,
                                           std::span<const double> node_attr, Aggregation agg1, Aggregation agg2)
{
    const std::size_t n = g.node_count();
    std::vector<std::vector<double>> outgoing(n), incoming(n);
    for (std::size_t a = 0; a < g.arc_count(); ++a) {
        outgoing[g.arcs()[a].src].push_back(message[a]);
        incoming[g.arcs()[a].dst].push_back(message[a]);
    }
    std::vector<double> score(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> sides;
        if (!outgoing[i].empty()) sides.push_back(aggregate(outgoing[i], agg1));
        if (!incoming[i].empty()) sides.push_back(aggregate(incoming[i], agg1));
        score[i] = sides.empty() ? node_attr[i] : aggregate(sides, agg2);
    }
    return score;
}

/// Nodes by descending score; equal scores keep ascending index order.
inline std::vector<std::size_t> rank_nodes(std::span<const double> score)
{
    std::vector<std::size_t> order(score.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    return order;
}

struct LearnTrace {
    std::vector<double> objective;
    std::vector<double> mean_edge_score;
};

struct LearnResult {
    MaskSet masks;
    Explanation explanation;
    LearnTrace trace;
};

namespace detail {

inline double binary_entropy(double p)
{
    const double q = 1.0 - p;
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (q > 0.0) h -= q * std::log(q);
    return h;
}

/// Adds lambda_size * mean(sigmoid(m)) + lambda_entropy * mean(H(sigmoid(m)))
/// to objective and its gradient to grad.
inline double add_regularizers(const Vector& logits, double lambda_size, double lambda_entropy, Eigen::Ref<Vector> grad)
{
    if (logits.size() == 0) return 0.0;
    const double inv = 1.0 / static_cast<double>(logits.size());
    double value = 0.0;
    for (Eigen::Index p = 0; p < logits.size(); ++p) {
        const double s = sigmoid(logits[p]);
        const double ds = s * (1.0 - s);
        value += inv * (lambda_size * s + lambda_entropy * binary_entropy(s));
        // dH/ds = log((1 - s) / s)
        const double d_entropy = (s > 0.0 && s < 1.0) ? std::log((1.0 - s) / s) : 0.0;
        grad[p] += inv * (lambda_size + lambda_entropy * d_entropy) * ds;
    }
    return value;
}

inline double mean_score(const Vector& logits, double beta)
{
    if (logits.size() == 0) return 1.0;
    double sum = 0.0;
    for (Eigen::Index p = 0; p < logits.size(); ++p) sum += importance_from_mask(logits[p], beta);
    return sum / static_cast<double>(logits.size());
}

} // namespace detail

/// Scores from learned logits: sigmoid(m / beta), and 1 for frozen sides.
inline void fill_mask_scores(const MaskSet& masks, const AttributedGraph& g, double beta, Explanation& e)
{
    const auto n = static_cast<Eigen::Index>(g.node_count());
    const auto d = static_cast<Eigen::Index>(g.attr_dim());
    e.edge_score.assign(g.arc_count(), 1.0);
    if (!masks.edges_frozen) {
        for (std::size_t a = 0; a < g.arc_count(); ++a) {
            e.edge_score[a] = importance_from_mask(masks.edge_logits[static_cast<Eigen::Index>(masks.arc_param[a])], beta);
        }
    }
    e.attr_score = Matrix::Ones(n, d);
    if (!masks.attributes_frozen) {
        for (Eigen::Index k = 0; k < n * d; ++k) {
            e.attr_score.data()[k] =
                importance_from_mask(masks.attr_logits[static_cast<Eigen::Index>(masks.attr_param[static_cast<std::size_t>(k)])], beta);
        }
    }
}

/// Optimizes the masks so the masked graph keeps the model's own
/// prediction, under hard-concrete gates and sparsity/entropy penalties.
inline LearnResult learn_masks(const GnnModel& model, const AttributedGraph& g, const ExplainConfig& config)
{
    config.validate();
    const auto& hc = config.hard_concrete;
    const auto original = forward(model, g);
    const std::size_t target = original.predicted_class;

    LearnResult result;
    MaskSet& masks = result.masks;
    masks = init_masks(g, config, hc.seed);

    const auto n_edge = masks.edge_logits.size();
    const auto n_attr = masks.attr_logits.size();
    Vector params(n_edge + n_attr);
    params << masks.edge_logits, masks.attr_logits;
    Adam adam(params.size(), AdamOptions{config.learning_rate});

    const auto n = static_cast<Eigen::Index>(g.node_count());
    const auto d = static_cast<Eigen::Index>(g.attr_dim());
    MaskedInput gates = MaskedInput::ones(g);
    Vector gate_slope(params.size());

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        masks.edge_logits = params.head(n_edge);
        masks.attr_logits = params.tail(n_attr);
        result.trace.mean_edge_score.push_back(detail::mean_score(masks.edge_logits, hc.beta));

        Vector param_gate(params.size());
        for (Eigen::Index p = 0; p < params.size(); ++p) {
            const double u = hc.stochastic ? counter_uniform(hc.seed, epoch, static_cast<std::uint64_t>(p)) : 0.5;
            const auto sample = sample_hard_concrete(params[p], hc, u);
            param_gate[p] = sample.gate;
            gate_slope[p] = sample.d_gate_d_logit;
        }
        if (!masks.edges_frozen) {
            for (std::size_t a = 0; a < g.arc_count(); ++a) {
                gates.edge_gate[static_cast<Eigen::Index>(a)] = param_gate[static_cast<Eigen::Index>(masks.arc_param[a])];
            }
        }
        if (!masks.attributes_frozen) {
            for (Eigen::Index k = 0; k < n * d; ++k) {
                gates.attribute_gate.data()[k] = param_gate[n_edge + static_cast<Eigen::Index>(masks.attr_param[static_cast<std::size_t>(k)])];
            }
        }

        const auto trace = forward_trace(model, g, &gates);
        double objective = cross_entropy(trace.result.probabilities, target);
        const Vector d_logits = cross_entropy_logit_gradient(trace.result.probabilities, target);
        const auto gate_grad = *backward(model, g, trace, d_logits, false, true).mask;

        Vector grad = Vector::Zero(params.size());
        if (!masks.edges_frozen) {
            for (std::size_t a = 0; a < g.arc_count(); ++a) {
                const auto p = static_cast<Eigen::Index>(masks.arc_param[a]);
                grad[p] += gate_grad.edge_gate[static_cast<Eigen::Index>(a)] * gate_slope[p];
            }
        }
        if (!masks.attributes_frozen) {
            for (Eigen::Index k = 0; k < n * d; ++k) {
                const auto p = n_edge + static_cast<Eigen::Index>(masks.attr_param[static_cast<std::size_t>(k)]);
                grad[p] += gate_grad.attribute_gate.data()[k] * gate_slope[p];
            }
        }
        objective += detail::add_regularizers(masks.edge_logits, config.lambda_edge_size, config.lambda_edge_entropy,
                                              grad.head(n_edge));
        objective += detail::add_regularizers(masks.attr_logits, config.lambda_attr_size, config.lambda_attr_entropy,
                                              grad.tail(n_attr));
        if (!std::isfinite(objective) || !grad.allFinite()) {
            throw Error(ErrorCode::non_finite_loss, "mask learning diverged at epoch " + std::to_string(epoch) +
                                                        " on graph " + g.graph_id());
        }
        result.trace.objective.push_back(objective);
        adam.step(params, grad);
    }
    masks.edge_logits = params.head(n_edge);
    masks.attr_logits = params.tail(n_attr);

    auto& e = result.explanation;
    e.graph_id = g.graph_id();
    e.original_prediction = target;
    e.original_probability = original.probabilities[static_cast<Eigen::Index>(target)];
    fill_mask_scores(masks, g, hc.beta, e);
    return result;
}

/// Fills node_attr_score, node_score and node_ranking from the edge and
/// attribute scores already present in e.
inline void score_nodes(Explanation& e, const AttributedGraph& g, const ExplainConfig& config)
{
    const std::size_t n = g.node_count();
    const std::size_t d = g.attr_dim();
    const bool per_node = config.effective_sharing().attributes == AttributeSharing::per_node;
    e.node_attr_score.assign(n, 1.0);
    if (config.mode != ExplainMode::edge_only) {
        for (std::size_t i = 0; i < n; ++i) {
            e.node_attr_score[i] = node_attr_importance(
                std::span<const double>(e.attr_score.data() + i * d, d), per_node);
        }
    }
    if (config.mode == ExplainMode::attribute_only) {
        e.node_score = e.node_attr_score;
    } else {
        std::vector<double> message(g.arc_count());
        for (std::size_t a = 0; a < g.arc_count(); ++a) {
            message[a] = message_importance(e.edge_score[a], e.node_attr_score[g.arcs()[a].src]);
        }
        e.node_score = node_importance(g, message, e.node_attr_score, config.agg1, config.agg2);
    }
    e.node_ranking = rank_nodes(e.node_score);
}

/// learn_masks, then pair aggregation (undirected graphs), node scoring
/// and ranking.
inline Explanation explain(const GnnModel& model, const AttributedGraph& g, const ExplainConfig& config)
{
    auto e = learn_masks(model, g, config).explanation;
    if (g.is_undirected()) e.edge_score = pair_aggregate_edge_scores(e.edge_score, g, config.pair_agg);
    score_nodes(e, g, config);
    return e;
}

} // namespace illuminati

#endif // ILLUMINATI_EXPLAINER_HPP
