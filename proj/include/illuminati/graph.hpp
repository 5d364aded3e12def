#ifndef ILLUMINATI_GRAPH_HPP
#define ILLUMINATI_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace illuminati {

enum class Directedness { directed, undirected };

struct Arc {
    std::size_t src;
    std::size_t dst;

    friend bool operator==(const Arc&, const Arc&) = default;
    friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// Sorted, duplicate-free set of node indices.
class NodeSet {
public:
    NodeSet() = default;
    NodeSet(std::initializer_list<std::size_t> members) : NodeSet(std::vector<std::size_t>(members)) {}
    explicit NodeSet(std::vector<std::size_t> members) : members_(std::move(members))
    {
        std::sort(members_.begin(), members_.end());
        members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    }

    static NodeSet all(std::size_t node_count)
    {
        std::vector<std::size_t> m(node_count);
        for (std::size_t i = 0; i < node_count; ++i) m[i] = i;
        return NodeSet(std::move(m));
    }

    [[nodiscard]] bool contains(std::size_t node) const
    {
        return std::binary_search(members_.begin(), members_.end(), node);
    }
    [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
    [[nodiscard]] bool empty() const noexcept { return members_.empty(); }
    [[nodiscard]] const std::vector<std::size_t>& members() const noexcept { return members_; }
    [[nodiscard]] auto begin() const noexcept { return members_.begin(); }
    [[nodiscard]] auto end() const noexcept { return members_.end(); }

    friend bool operator==(const NodeSet&, const NodeSet&) = default;

private:
    std::vector<std::size_t> members_;
};

/// Immutable attributed graph stored as a list of directed arcs.
///
/// Undirected graphs keep both directions of every edge; the two arcs of an
/// edge sit next to each other so that pair_mate(a) == a ^ 1. Self-loops are
/// never stored.
class AttributedGraph {
public:
    AttributedGraph() = default;

    [[nodiscard]] std::size_t node_count() const noexcept { return node_count_; }
    [[nodiscard]] std::size_t arc_count() const noexcept { return arcs_.size(); }
    [[nodiscard]] std::size_t attr_dim() const noexcept { return static_cast<std::size_t>(attributes_.cols()); }
    [[nodiscard]] const std::vector<Arc>& arcs() const noexcept { return arcs_; }
    [[nodiscard]] const Matrix& attributes() const noexcept { return attributes_; }
    [[nodiscard]] Directedness directedness() const noexcept { return directedness_; }
    [[nodiscard]] bool is_undirected() const noexcept { return directedness_ == Directedness::undirected; }
    [[nodiscard]] const std::optional<std::size_t>& label() const noexcept { return label_; }
    [[nodiscard]] const std::string& graph_id() const noexcept { return graph_id_; }

    /// Index of each node in the graph this one was extracted from (identity
    /// for graphs built directly).
    [[nodiscard]] const std::vector<std::size_t>& original_index() const noexcept { return original_index_; }

    [[nodiscard]] std::size_t pair_mate(std::size_t arc) const
    {
        if (!is_undirected()) throw Error(ErrorCode::not_undirected, "pair_mate on a directed graph");
        return arc ^ std::size_t{1};
    }

    /// Undirected edges as (low, high) pairs, one per arc pair.
    [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> undirected_edges() const
    {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t a = 0; a < arcs_.size(); a += is_undirected() ? 2 : 1) {
            out.emplace_back(arcs_[a].src, arcs_[a].dst);
        }
        return out;
    }

    void set_graph_id(std::string id) { graph_id_ = std::move(id); }
    void set_label(std::optional<std::size_t> label) { label_ = label; }

    friend AttributedGraph build_graph(std::size_t, const std::vector<std::pair<std::size_t, std::size_t>>&, Matrix,
                                       Directedness, std::optional<std::size_t>, std::string);
    friend AttributedGraph node_induced_subgraph(const AttributedGraph&, const NodeSet&);

private:
    std::size_t node_count_ = 0;
    std::vector<Arc> arcs_;
    Matrix attributes_;
    Directedness directedness_ = Directedness::directed;
    std::optional<std::size_t> label_;
    std::string graph_id_;
    std::vector<std::size_t> original_index_;
};

/// Builds the canonical graph: self-loops and duplicate edges dropped,
/// directed arcs sorted by (src, dst), undirected edges sorted by
/// (low, high) and expanded into adjacent (low, high), (high, low) arcs.
inline AttributedGraph build_graph(std::size_t node_count, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                   Matrix attributes, Directedness directedness,
                                   std::optional<std::size_t> label = std::nullopt, std::string graph_id = {})
{
    if (static_cast<std::size_t>(attributes.rows()) != node_count) {
        throw Error(ErrorCode::shape_mismatch, "attribute rows " + std::to_string(attributes.rows()) +
                                                   " != node_count " + std::to_string(node_count));
    }
    std::vector<Arc> canonical;
    canonical.reserve(edges.size());
    for (auto [s, d] : edges) {
        if (s >= node_count || d >= node_count) {
            throw Error(ErrorCode::index_out_of_range, "edge (" + std::to_string(s) + "," + std::to_string(d) +
                                                           ") with node_count " + std::to_string(node_count));
        }
        if (s == d) continue;
        if (directedness == Directedness::undirected && s > d) std::swap(s, d);
        canonical.push_back({s, d});
    }
    std::sort(canonical.begin(), canonical.end());
    canonical.erase(std::unique(canonical.begin(), canonical.end()), canonical.end());

    AttributedGraph g;
    g.node_count_ = node_count;
    g.attributes_ = std::move(attributes);
    g.directedness_ = directedness;
    g.label_ = label;
    g.graph_id_ = std::move(graph_id);
    g.original_index_.resize(node_count);
    for (std::size_t i = 0; i < node_count; ++i) g.original_index_[i] = i;
    if (directedness == Directedness::undirected) {
        g.arcs_.reserve(2 * canonical.size());
        for (const auto& e : canonical) {
            g.arcs_.push_back({e.src, e.dst});
            g.arcs_.push_back({e.dst, e.src});
        }
    } else {
        g.arcs_ = std::move(canonical);
    }
    return g;
}

inline void check_node_set(const AttributedGraph& g, const NodeSet& nodes)
{
    if (!nodes.empty() && nodes.members().back() >= g.node_count()) {
        throw Error(ErrorCode::index_out_of_range, "node " + std::to_string(nodes.members().back()) +
                                                       " outside graph of " + std::to_string(g.node_count()));
    }
}

/// Keeps exactly the nodes in `keep` (re-indexed densely in ascending order)
/// and every arc whose endpoints are both kept.
inline AttributedGraph node_induced_subgraph(const AttributedGraph& g, const NodeSet& keep)
{
    check_node_set(g, keep);
    constexpr auto dropped = static_cast<std::size_t>(-1);
    std::vector<std::size_t> new_index(g.node_count(), dropped);
    AttributedGraph sub;
    sub.node_count_ = keep.size();
    sub.directedness_ = g.directedness_;
    sub.label_ = g.label_;
    sub.graph_id_ = g.graph_id_;
    sub.attributes_.resize(static_cast<Eigen::Index>(keep.size()), g.attributes_.cols());
    std::size_t next = 0;
    for (std::size_t old : keep) {
        new_index[old] = next;
        sub.attributes_.row(static_cast<Eigen::Index>(next)) = g.attributes_.row(static_cast<Eigen::Index>(old));
        sub.original_index_.push_back(g.original_index_[old]);
        ++next;
    }
    // Dense ascending re-indexing preserves the canonical arc order.
    for (const auto& arc : g.arcs_) {
        const auto s = new_index[arc.src];
        const auto d = new_index[arc.dst];
        if (s != dropped && d != dropped) sub.arcs_.push_back({s, d});
    }
    return sub;
}

inline NodeSet complement_set(const AttributedGraph& g, const NodeSet& keep)
{
    check_node_set(g, keep);
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (!keep.contains(i)) rest.push_back(i);
    }
    return NodeSet(std::move(rest));
}

/// Same nodes and attributes with no arcs.
inline AttributedGraph edgeless_copy(const AttributedGraph& g)
{
    auto out = build_graph(g.node_count(), {}, g.attributes(), g.directedness(), g.label(), g.graph_id());
    return out;
}

} // namespace illuminati

#endif // ILLUMINATI_GRAPH_HPP
