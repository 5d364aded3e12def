#ifndef ILLUMINATI_ORACLE_HPP
#define ILLUMINATI_ORACLE_HPP

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "graph.hpp"
#include "model.hpp"

// Brute-force ground truth for small graphs. Nothing here uses mask
// learning or node rankings.

namespace illuminati::oracle {

inline constexpr std::size_t max_nodes = 14;

inline void guard_size(const AttributedGraph& g)
{
    if (g.node_count() > max_nodes) {
        throw Error(ErrorCode::too_large, g.graph_id() + " has " + std::to_string(g.node_count()) + " nodes, limit " +
                                              std::to_string(max_nodes));
    }
}

/// Calls visit(subset) for every k-subset of [0, n) in lexicographic order.
template <typename Visit>
void for_each_subset(std::size_t n, std::size_t k, Visit&& visit)
{
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    while (true) {
        visit(static_cast<const std::vector<std::size_t>&>(idx));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

/// Probability of `cls` on the subgraph induced by `nodes`.
inline double subset_probability(const GnnModel& model, const AttributedGraph& g, const NodeSet& nodes, std::size_t cls)
{
    return forward(model, node_induced_subgraph(g, nodes)).probabilities[static_cast<Eigen::Index>(cls)];
}

struct BestSubset {
    NodeSet nodes;
    double probability = 0.0;
};

/// The k-subset maximizing the probability of the original prediction;
/// the lexicographically first one wins ties.
inline BestSubset brute_force_best_subset(const GnnModel& model, const AttributedGraph& g, std::size_t k)
{
    guard_size(g);
    const auto cls = forward(model, g).predicted_class;
    BestSubset best;
    best.probability = -1.0;
    for_each_subset(g.node_count(), k, [&](const std::vector<std::size_t>& subset) {
        NodeSet nodes(subset);
        const double p = subset_probability(model, g, nodes, cls);
        if (p > best.probability) best = {std::move(nodes), p};
    });
    return best;
}

/// Probability of the original prediction for every k-subset, in
/// lexicographic subset order.
inline std::vector<double> all_subset_probabilities(const GnnModel& model, const AttributedGraph& g, std::size_t k)
{
    guard_size(g);
    const auto cls = forward(model, g).predicted_class;
    std::vector<double> out;
    for_each_subset(g.node_count(), k, [&](const std::vector<std::size_t>& subset) {
        out.push_back(subset_probability(model, g, NodeSet(subset), cls));
    });
    return out;
}

/// Smallest k >= 1 for which some k-subset keeps the original prediction.
inline std::size_t exhaustive_sparsity(const GnnModel& model, const AttributedGraph& g)
{
    guard_size(g);
    const auto cls = forward(model, g).predicted_class;
    for (std::size_t k = 1; k <= g.node_count(); ++k) {
        bool found = false;
        for_each_subset(g.node_count(), k, [&](const std::vector<std::size_t>& subset) {
            if (!found && forward(model, node_induced_subgraph(g, NodeSet(subset))).predicted_class == cls) found = true;
        });
        if (found) return k;
    }
    return g.node_count();
}

/// Per-arc drop in the original class probability when that arc's gate is
/// zeroed (with its pair-mate on undirected graphs).
inline std::vector<double> occlusion_scores(const GnnModel& model, const AttributedGraph& g)
{
    const auto base = forward(model, g);
    const auto cls = static_cast<Eigen::Index>(base.predicted_class);
    std::vector<double> drop(g.arc_count(), 0.0);
    for (std::size_t a = 0; a < g.arc_count(); ++a) {
        if (g.is_undirected() && a % 2 == 1) {
            drop[a] = drop[a - 1];
            continue;
        }
        auto gates = MaskedInput::ones(g);
        gates.edge_gate[static_cast<Eigen::Index>(a)] = 0.0;
        if (g.is_undirected()) gates.edge_gate[static_cast<Eigen::Index>(g.pair_mate(a))] = 0.0;
        drop[a] = base.probabilities[cls] - forward(model, g, gates).probabilities[cls];
    }
    return drop;
}

struct OracleResult {
    std::string graph_id;
    std::size_t k = 0;
    BestSubset best;
    std::size_t exhaustive_min_k = 0;
    std::vector<double> occlusion_drop;
};

inline OracleResult run_oracle(const GnnModel& model, const AttributedGraph& g, std::size_t k)
{
    return {g.graph_id(), k, brute_force_best_subset(model, g, k), exhaustive_sparsity(model, g), occlusion_scores(model, g)};
}

inline nlohmann::json oracle_to_json(const OracleResult& r)
{
    nlohmann::json j;
    j["graph_id"] = r.graph_id;
    j["k"] = r.k;
    j["best_subset"] = r.best.nodes.members();
    j["best_probability"] = r.best.probability;
    j["exhaustive_min_k"] = r.exhaustive_min_k;
    j["occlusion_drop"] = r.occlusion_drop;
    return j;
}

} // namespace illuminati::oracle

#endif // ILLUMINATI_ORACLE_HPP
