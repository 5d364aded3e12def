#ifndef ILLUMINATI_DOT_HPP
#define ILLUMINATI_DOT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "explainer.hpp"
#include "graph.hpp"

namespace illuminati {

inline constexpr std::size_t dot_fill_buckets = 10;

/// Bucket 0 (lightest) to 9 (darkest) for a score in [0, 1].
inline std::size_t fill_bucket(double score)
{
    const double clamped = std::clamp(score, 0.0, 1.0);
    return std::min(dot_fill_buckets - 1, static_cast<std::size_t>(clamped * static_cast<double>(dot_fill_buckets)));
}

/// White to dark red, one color per bucket.
inline std::string bucket_color(std::size_t bucket)
{
    const double t = static_cast<double>(bucket) / static_cast<double>(dot_fill_buckets - 1);
    const auto channel = [&](double from, double to) { return static_cast<int>(std::lround(from + (to - from) * t)); };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(255, 165), channel(255, 0), channel(255, 38));
    return buf;
}

inline std::string format_score(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

/// DOT digraph: node fill darkens with node score, pen width grows with
/// arc score, tooltips list each node's top attributes.
inline std::string to_dot(const AttributedGraph& g, const Explanation& e, std::size_t top_attributes = 3)
{
    std::string out = "digraph \"" + g.graph_id() + "\" {\n";
    out += "  node [shape=circle, style=filled, fontname=\"Helvetica\"];\n";
    const auto d = static_cast<std::size_t>(e.attr_score.cols());
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto bucket = fill_bucket(e.node_score[i]);
        std::vector<std::size_t> order(d);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return e.attr_score(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) >
                   e.attr_score(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
        });
        std::string tooltip = "score=" + format_score(e.node_score[i]);
        for (std::size_t r = 0; r < std::min(top_attributes, d); ++r) {
            tooltip += " x" + std::to_string(order[r]) + "=" +
                       format_score(e.attr_score(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(order[r])));
        }
        out += "  n" + std::to_string(i) + " [label=\"" + std::to_string(i) + "\", fillcolor=\"" + bucket_color(bucket) +
               "\", fontcolor=\"" + (bucket >= 6 ? "white" : "black") + "\", tooltip=\"" + tooltip + "\"];\n";
    }
    for (std::size_t a = 0; a < g.arc_count(); ++a) {
        const double s = std::clamp(e.edge_score[a], 0.0, 1.0);
        out += "  n" + std::to_string(g.arcs()[a].src) + " -> n" + std::to_string(g.arcs()[a].dst) +
               " [penwidth=" + format_score(0.5 + 4.5 * s) + ", tooltip=\"" + format_score(s) + "\"];\n";
    }
    out += "}\n";
    return out;
}

} // namespace illuminati

#endif // ILLUMINATI_DOT_HPP
