#ifndef ILLUMINATI_METRICS_HPP
#define ILLUMINATI_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "explainer.hpp"
#include "graph.hpp"
#include "model.hpp"
#include "parallel.hpp"

namespace illuminati {

/// Subgraph size: an explicit node count, or a rate of the graph size.
struct Budget {
    enum class Kind { count, rate };
    Kind kind = Kind::count;
    std::size_t count = 0;
    double rate = 0.0;

    static Budget top_k(std::size_t k) { return {Kind::count, k, 0.0}; }
    static Budget top_rate(double r) { return {Kind::rate, 0, r}; }
    static Budget full() { return top_rate(1.0); }

    [[nodiscard]] std::string describe() const
    {
        if (kind == Kind::count) return "k=" + std::to_string(count);
        std::ostringstream ss;
        ss << "r=" << rate;
        return ss.str();
    }
};

/// Number of nodes to keep, or nullopt when the budget exceeds the graph
/// (such graphs are skipped). Rates round half up with a minimum of 1.
inline std::optional<std::size_t> resolve_budget(std::size_t node_count, const Budget& budget)
{
    if (budget.kind == Budget::Kind::rate) {
        if (!(budget.rate > 0.0 && budget.rate <= 1.0)) {
            throw Error(ErrorCode::invalid_budget, "rate must lie in (0, 1], got " + std::to_string(budget.rate));
        }
        const auto k = static_cast<std::size_t>(std::floor(budget.rate * static_cast<double>(node_count) + 0.5));
        return std::min(node_count, std::max<std::size_t>(1, k));
    }
    if (budget.count > node_count) return std::nullopt;
    return budget.count;
}

struct TopNodes {
    NodeSet nodes;
    bool skipped = false;
};

inline TopNodes extract_topk_nodes(const Explanation& e, const Budget& budget)
{
    const auto k = resolve_budget(e.node_ranking.size(), budget);
    if (!k) return {{}, true};
    return {NodeSet(std::vector<std::size_t>(e.node_ranking.begin(), e.node_ranking.begin() + static_cast<std::ptrdiff_t>(*k))),
            false};
}

/// Prediction on the zero-node graph.
inline std::size_t default_prediction(const GnnModel& model)
{
    return forward(model, empty_graph(model.attr_dim)).predicted_class;
}

inline std::size_t predict(const GnnModel& model, const AttributedGraph& g) { return forward(model, g).predicted_class; }

struct GraphVerdict {
    std::string graph_id;
    std::string budget;
    bool skipped = false;
    std::size_t kept_nodes = 0;
    bool retained_explained = false;
    bool retained_remaining = false;
    std::optional<std::size_t> min_k;
};

struct EvalReport {
    double ep_explained = 0.0;
    double ep_remaining = 0.0;
    std::optional<double> ep_attribute;
    std::optional<double> sparsity;
    std::size_t eligible_count = 0;
    std::size_t evaluated_count = 0;
    std::vector<GraphVerdict> per_graph;
};

namespace detail {

inline std::vector<const Explanation*> match_explanations(std::span<const AttributedGraph> graphs,
                                                          std::span<const Explanation> explanations)
{
    std::unordered_map<std::string, const Explanation*> by_id;
    for (const auto& e : explanations) by_id.emplace(e.graph_id, &e);
    std::vector<const Explanation*> out;
    std::string missing;
    for (const auto& g : graphs) {
        auto it = by_id.find(g.graph_id());
        if (it == by_id.end()) {
            missing += (missing.empty() ? "" : ", ") + g.graph_id();
            out.push_back(nullptr);
            continue;
        }
        if (it->second->node_ranking.size() != g.node_count()) {
            throw Error(ErrorCode::shape_mismatch, "explanation for " + g.graph_id() + " ranks " +
                                                       std::to_string(it->second->node_ranking.size()) + " nodes");
        }
        out.push_back(it->second);
    }
    if (!missing.empty()) throw Error(ErrorCode::missing_explanation, missing);
    return out;
}

inline double fraction(std::size_t hits, std::size_t total)
{
    return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

/// Explained/remaining verdicts for one graph at one budget.
inline GraphVerdict judge(const GnnModel& model, const AttributedGraph& g, const Explanation& e, const Budget& budget,
                          std::size_t original)
{
    GraphVerdict v;
    v.graph_id = g.graph_id();
    v.budget = budget.describe();
    const auto top = extract_topk_nodes(e, budget);
    v.skipped = top.skipped;
    if (top.skipped) return v;
    v.kept_nodes = top.nodes.size();
    v.retained_explained = predict(model, node_induced_subgraph(g, top.nodes)) == original;
    v.retained_remaining = predict(model, node_induced_subgraph(g, complement_set(g, top.nodes))) == original;
    return v;
}

} // namespace detail

/// Smallest prefix of the ranking whose induced subgraph keeps the original
/// prediction; node_count when no proper prefix does.
inline std::size_t ranking_min_k(const GnnModel& model, const AttributedGraph& g, std::span<const std::size_t> ranking,
                                 std::size_t original)
{
    const std::size_t n = g.node_count();
    for (std::size_t k = 1; k <= n; ++k) {
        NodeSet prefix(std::vector<std::size_t>(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k)));
        if (predict(model, node_induced_subgraph(g, prefix)) == original) return k;
    }
    return n;
}

/// Fraction of non-skipped graphs whose top-budget subgraph keeps the
/// model's original prediction.
inline double ep_explained(const GnnModel& model, std::span<const AttributedGraph> graphs,
                           std::span<const Explanation> explanations, const Budget& budget, std::size_t jobs = 1)
{
    const auto matched = detail::match_explanations(graphs, explanations);
    std::vector<GraphVerdict> verdicts(graphs.size());
    parallel_for(graphs.size(), jobs, [&](std::size_t i) {
        verdicts[i] = detail::judge(model, graphs[i], *matched[i], budget, predict(model, graphs[i]));
    });
    std::size_t hits = 0, total = 0;
    for (const auto& v : verdicts) {
        if (v.skipped) continue;
        ++total;
        hits += v.retained_explained ? 1 : 0;
    }
    return detail::fraction(hits, total);
}

/// As ep_explained, on the nodes outside the top-budget set.
inline double ep_remaining(const GnnModel& model, std::span<const AttributedGraph> graphs,
                           std::span<const Explanation> explanations, const Budget& budget, std::size_t jobs = 1)
{
    const auto matched = detail::match_explanations(graphs, explanations);
    std::vector<GraphVerdict> verdicts(graphs.size());
    parallel_for(graphs.size(), jobs, [&](std::size_t i) {
        verdicts[i] = detail::judge(model, graphs[i], *matched[i], budget, predict(model, graphs[i]));
    });
    std::size_t hits = 0, total = 0;
    for (const auto& v : verdicts) {
        if (v.skipped) continue;
        ++total;
        hits += v.retained_remaining ? 1 : 0;
    }
    return detail::fraction(hits, total);
}

/// Attributes kept per node: the top_t highest scores, lower index first on ties.
inline Matrix top_attribute_mask(const Matrix& attr_score, std::size_t top_t)
{
    Matrix keep = Matrix::Zero(attr_score.rows(), attr_score.cols());
    const auto d = static_cast<std::size_t>(attr_score.cols());
    std::vector<std::size_t> order(d);
    for (Eigen::Index i = 0; i < attr_score.rows(); ++i) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return attr_score(i, static_cast<Eigen::Index>(a)) > attr_score(i, static_cast<Eigen::Index>(b));
        });
        for (std::size_t r = 0; r < std::min(top_t, d); ++r) keep(i, static_cast<Eigen::Index>(order[r])) = 1.0;
    }
    return keep;
}

/// EP with every node's attributes outside its top_t zeroed, structure intact.
inline double ep_attribute(const GnnModel& model, std::span<const AttributedGraph> graphs,
                           std::span<const Explanation> explanations, std::size_t top_t, std::size_t jobs = 1)
{
    const auto matched = detail::match_explanations(graphs, explanations);
    std::vector<char> retained(graphs.size(), 0);
    parallel_for(graphs.size(), jobs, [&](std::size_t i) {
        const auto& g = graphs[i];
        const auto& scores = matched[i]->attr_score;
        if (static_cast<std::size_t>(scores.rows()) != g.node_count() ||
            static_cast<std::size_t>(scores.cols()) != g.attr_dim()) {
            throw Error(ErrorCode::missing_attribute_scores, g.graph_id());
        }
        const auto original = predict(model, g);
        MaskedInput gates = MaskedInput::ones(g);
        gates.attribute_gate = top_attribute_mask(scores, top_t);
        retained[i] = forward(model, g, gates).predicted_class == original;
    });
    return detail::fraction(static_cast<std::size_t>(std::count(retained.begin(), retained.end(), 1)), graphs.size());
}

struct SparsityResult {
    std::optional<double> average;
    std::size_t eligible_count = 0;
    std::vector<std::optional<std::size_t>> min_k; // nullopt for ineligible graphs
};

/// Average ranking-prefix min_k over graphs whose prediction differs from
/// the empty-graph default.
inline SparsityResult sparsity(const GnnModel& model, std::span<const AttributedGraph> graphs,
                               std::span<const Explanation> explanations, std::size_t jobs = 1)
{
    const auto matched = detail::match_explanations(graphs, explanations);
    const auto fallback = default_prediction(model);
    SparsityResult r;
    r.min_k.resize(graphs.size());
    parallel_for(graphs.size(), jobs, [&](std::size_t i) {
        const auto original = predict(model, graphs[i]);
        if (original == fallback) return;
        r.min_k[i] = ranking_min_k(model, graphs[i], matched[i]->node_ranking, original);
    });
    double sum = 0.0;
    for (const auto& k : r.min_k) {
        if (!k) continue;
        ++r.eligible_count;
        sum += static_cast<double>(*k);
    }
    if (r.eligible_count > 0) r.average = sum / static_cast<double>(r.eligible_count);
    return r;
}

/// Everything in one pass, per-graph verdicts in input order.
inline EvalReport evaluate(const GnnModel& model, std::span<const AttributedGraph> graphs,
                           std::span<const Explanation> explanations, const Budget& budget,
                           std::optional<std::size_t> attr_top = std::nullopt, std::size_t jobs = 1)
{
    const auto matched = detail::match_explanations(graphs, explanations);
    const auto fallback = default_prediction(model);
    EvalReport report;
    report.per_graph.resize(graphs.size());
    parallel_for(graphs.size(), jobs, [&](std::size_t i) {
        const auto& g = graphs[i];
        const auto original = predict(model, g);
        auto v = detail::judge(model, g, *matched[i], budget, original);
        if (original != fallback) v.min_k = ranking_min_k(model, g, matched[i]->node_ranking, original);
        report.per_graph[i] = std::move(v);
    });
    std::size_t explained = 0, remaining = 0;
    double min_k_sum = 0.0;
    for (const auto& v : report.per_graph) {
        if (v.min_k) {
            ++report.eligible_count;
            min_k_sum += static_cast<double>(*v.min_k);
        }
        if (v.skipped) continue;
        ++report.evaluated_count;
        explained += v.retained_explained ? 1 : 0;
        remaining += v.retained_remaining ? 1 : 0;
    }
    report.ep_explained = detail::fraction(explained, report.evaluated_count);
    report.ep_remaining = detail::fraction(remaining, report.evaluated_count);
    if (report.eligible_count > 0) report.sparsity = min_k_sum / static_cast<double>(report.eligible_count);
    if (attr_top) report.ep_attribute = ep_attribute(model, graphs, explanations, *attr_top, jobs);
    return report;
}

inline nlohmann::json report_to_json(const EvalReport& r)
{
    nlohmann::json j;
    j["ep_explained"] = r.ep_explained;
    j["ep_remaining"] = r.ep_remaining;
    j["ep_attribute"] = r.ep_attribute ? nlohmann::json(*r.ep_attribute) : nlohmann::json(nullptr);
    j["sparsity"] = r.sparsity ? nlohmann::json(*r.sparsity) : nlohmann::json(nullptr);
    j["eligible_count"] = r.eligible_count;
    j["evaluated_count"] = r.evaluated_count;
    auto rows = nlohmann::json::array();
    for (const auto& v : r.per_graph) {
        nlohmann::json row;
        row["graph_id"] = v.graph_id;
        row["budget"] = v.budget;
        row["skipped"] = v.skipped;
        row["kept_nodes"] = v.kept_nodes;
        row["retained_explained"] = v.retained_explained;
        row["retained_remaining"] = v.retained_remaining;
        row["min_k"] = v.min_k ? nlohmann::json(*v.min_k) : nlohmann::json(nullptr);
        rows.push_back(std::move(row));
    }
    j["per_graph"] = std::move(rows);
    return j;
}

inline std::string csv_header() { return "graph_id,budget,retained_explained,retained_remaining,min_k\n"; }

/// One CSV row per graph; skipped graphs write "skip" in the verdict columns.
inline std::string verdicts_to_csv(std::span<const GraphVerdict> verdicts)
{
    std::string out;
    for (const auto& v : verdicts) {
        out += v.graph_id + "," + v.budget + ",";
        if (v.skipped) {
            out += "skip,skip,";
        } else {
            out += std::string(v.retained_explained ? "1" : "0") + "," + (v.retained_remaining ? "1" : "0") + ",";
        }
        out += (v.min_k ? std::to_string(*v.min_k) : std::string()) + "\n";
    }
    return out;
}

} // namespace illuminati

#endif // ILLUMINATI_METRICS_HPP
