#ifndef ILLUMINATI_DATASET_HPP
#define ILLUMINATI_DATASET_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "graph.hpp"
#include "io.hpp"

namespace illuminati {

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;

    friend bool operator==(const Split&, const Split&) = default;
};

struct Dataset {
    std::string name;
    std::size_t attr_dim = 0;
    std::size_t num_classes = 2;
    std::vector<AttributedGraph> graphs;
    Split split;
    std::uint64_t generation_seed = 0;

    /// Throws ValidationError on inconsistent attr_dim, labels or splits.
    void validate() const
    {
        auto fail = [](const std::string& what) { throw Error(ErrorCode::validation_error, what); };
        for (const auto& g : graphs) {
            if (g.node_count() > 0 && g.attr_dim() != attr_dim) {
                fail("graph " + g.graph_id() + " has attr_dim " + std::to_string(g.attr_dim()) + ", dataset has " +
                     std::to_string(attr_dim));
            }
            if (g.label() && *g.label() >= num_classes) fail("graph " + g.graph_id() + " label out of range");
        }
        std::vector<char> seen(graphs.size(), 0);
        for (const auto* part : {&split.train, &split.validation, &split.test}) {
            for (auto i : *part) {
                if (i >= graphs.size()) fail("split index " + std::to_string(i) + " out of range");
                if (seen[i]++) fail("split index " + std::to_string(i) + " appears twice");
            }
        }
    }

    [[nodiscard]] const std::vector<std::size_t>& split_indices(const std::string& which) const
    {
        if (which == "train") return split.train;
        if (which == "validation" || which == "val") return split.validation;
        if (which == "test") return split.test;
        throw Error(ErrorCode::validation_error, "unknown split " + which);
    }
};

namespace motifs {

inline const std::vector<std::pair<std::size_t, std::size_t>>& house()
{
    // 5-cycle 0-1-2-3-4 plus chord (1,4); 0,1,4 form the roof.
    static const std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {1, 4}};
    return edges;
}

inline const std::vector<std::pair<std::size_t, std::size_t>>& cycle()
{
    static const std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}};
    return edges;
}

} // namespace motifs

/// Barabasi-Albert tree with attachment 1: node t >= 1 links to an existing
/// node drawn proportionally to degree (node 1 always links to node 0).
inline std::vector<std::pair<std::size_t, std::size_t>> barabasi_albert_tree(std::size_t nodes, std::mt19937_64& rng)
{
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<std::size_t> endpoints;
    for (std::size_t t = 1; t < nodes; ++t) {
        std::size_t target = 0;
        if (!endpoints.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
            target = endpoints[pick(rng)];
        }
        edges.emplace_back(target, t);
        endpoints.push_back(target);
        endpoints.push_back(t);
    }
    return edges;
}

struct Ba2MotifsOptions {
    std::size_t base_nodes = 20;
    std::size_t attr_dim = 10;
    double attr_value = 0.1;
};

/// Regenerated BA-2motifs: label 0 graphs carry a house motif, label 1 a
/// 5-cycle, joined to the base by one edge between random endpoints.
/// Base nodes come first, motif nodes are the last five.
inline Dataset generate_ba2motifs(std::size_t n_graphs, std::uint64_t seed, const Ba2MotifsOptions& opt = {})
{
    if (n_graphs < 2 || n_graphs % 2 != 0) {
        throw Error(ErrorCode::invalid_count, "n_graphs must be even and >= 2, got " + std::to_string(n_graphs));
    }
    if (opt.base_nodes < 1) throw Error(ErrorCode::invalid_count, "base_nodes must be >= 1");
    std::mt19937_64 rng(seed);
    Dataset data;
    data.name = "ba2motifs";
    data.attr_dim = opt.attr_dim;
    data.num_classes = 2;
    data.generation_seed = seed;
    const std::size_t n = opt.base_nodes + 5;
    for (std::size_t k = 0; k < n_graphs; ++k) {
        const std::size_t label = k < n_graphs / 2 ? 0 : 1;
        auto edges = barabasi_albert_tree(opt.base_nodes, rng);
        const auto& motif = label == 0 ? motifs::house() : motifs::cycle();
        for (auto [a, b] : motif) edges.emplace_back(opt.base_nodes + a, opt.base_nodes + b);
        std::uniform_int_distribution<std::size_t> pick_motif(0, 4);
        std::uniform_int_distribution<std::size_t> pick_base(0, opt.base_nodes - 1);
        const auto m = opt.base_nodes + pick_motif(rng);
        const auto b = pick_base(rng);
        edges.emplace_back(b, m);
        char id[32];
        std::snprintf(id, sizeof id, "ba2motifs-%04zu", k);
        data.graphs.push_back(build_graph(n, edges,
                                          Matrix::Constant(static_cast<Eigen::Index>(n),
                                                           static_cast<Eigen::Index>(opt.attr_dim), opt.attr_value),
                                          Directedness::undirected, label, id));
    }
    // Stratified 80/10/10.
    for (std::size_t label = 0; label < 2; ++label) {
        std::vector<std::size_t> members;
        for (std::size_t k = 0; k < n_graphs; ++k) {
            if (*data.graphs[k].label() == label) members.push_back(k);
        }
        std::shuffle(members.begin(), members.end(), rng);
        const auto n_train = members.size() * 8 / 10;
        const auto n_val = members.size() / 10;
        for (std::size_t r = 0; r < members.size(); ++r) {
            auto& part = r < n_train ? data.split.train : r < n_train + n_val ? data.split.validation : data.split.test;
            part.push_back(members[r]);
        }
    }
    for (auto* part : {&data.split.train, &data.split.validation, &data.split.test}) std::sort(part->begin(), part->end());
    return data;
}

inline constexpr int dataset_format_version = 1;

inline nlohmann::json matrix_to_json(const Matrix& m)
{
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j, std::size_t cols, const std::string& field)
{
    if (!j.is_array()) throw Error(ErrorCode::parse_error, field + ": expected array of rows");
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        const auto& row = j[r];
        if (!row.is_array() || row.size() != cols) {
            throw Error(ErrorCode::shape_mismatch, field + "[" + std::to_string(r) + "]: expected " + std::to_string(cols) + " columns");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!row[c].is_number()) throw Error(ErrorCode::parse_error, field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]: not a number");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
        }
    }
    return m;
}

inline nlohmann::json graph_to_json(const AttributedGraph& g)
{
    nlohmann::json j;
    j["id"] = g.graph_id();
    j["n"] = g.node_count();
    j["directed"] = !g.is_undirected();
    auto edges = nlohmann::json::array();
    if (g.is_undirected()) {
        for (auto [s, d] : g.undirected_edges()) edges.push_back({s, d});
    } else {
        for (const auto& a : g.arcs()) edges.push_back({a.src, a.dst});
    }
    j["edges"] = std::move(edges);
    j["x"] = matrix_to_json(g.attributes());
    j["y"] = g.label() ? nlohmann::json(*g.label()) : nlohmann::json(nullptr);
    return j;
}

inline AttributedGraph graph_from_json(const nlohmann::json& j, std::size_t attr_dim, const std::string& field)
{
    try {
        const auto n = j.at("n").get<std::size_t>();
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        const auto& e = j.at("edges");
        for (std::size_t k = 0; k < e.size(); ++k) {
            if (!e[k].is_array() || e[k].size() != 2) {
                throw Error(ErrorCode::parse_error, field + ".edges[" + std::to_string(k) + "]: expected [src, dst]");
            }
            edges.emplace_back(e[k][0].get<std::size_t>(), e[k][1].get<std::size_t>());
        }
        std::optional<std::size_t> label;
        if (j.contains("y") && !j["y"].is_null()) label = j["y"].get<std::size_t>();
        return build_graph(n, edges, matrix_from_json(j.at("x"), attr_dim, field + ".x"),
                           j.at("directed").get<bool>() ? Directedness::directed : Directedness::undirected, label,
                           j.at("id").get<std::string>());
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::parse_error, field + ": " + ex.what());
    } catch (const Error& ex) {
        if (ex.code() == ErrorCode::shape_mismatch) throw Error(ErrorCode::validation_error, field + ": " + ex.what());
        throw;
    }
}

inline nlohmann::json dataset_to_json(const Dataset& d)
{
    nlohmann::json j;
    j["format_version"] = dataset_format_version;
    j["name"] = d.name;
    j["attr_dim"] = d.attr_dim;
    j["num_classes"] = d.num_classes;
    j["generation_seed"] = d.generation_seed;
    j["splits"] = {{"train", d.split.train}, {"validation", d.split.validation}, {"test", d.split.test}};
    auto graphs = nlohmann::json::array();
    for (const auto& g : d.graphs) graphs.push_back(graph_to_json(g));
    j["graphs"] = std::move(graphs);
    return j;
}

inline Dataset dataset_from_json(const nlohmann::json& j)
{
    Dataset d;
    try {
        const auto version = j.at("format_version").get<int>();
        if (version != dataset_format_version) {
            throw Error(ErrorCode::format_version, "dataset format_version " + std::to_string(version));
        }
        d.name = j.at("name").get<std::string>();
        d.attr_dim = j.at("attr_dim").get<std::size_t>();
        d.num_classes = j.at("num_classes").get<std::size_t>();
        d.generation_seed = j.value("generation_seed", std::uint64_t{0});
        const auto& s = j.at("splits");
        d.split.train = s.at("train").get<std::vector<std::size_t>>();
        d.split.validation = s.at("validation").get<std::vector<std::size_t>>();
        d.split.test = s.at("test").get<std::vector<std::size_t>>();
        const auto& graphs = j.at("graphs");
        for (std::size_t k = 0; k < graphs.size(); ++k) {
            const auto field = "graphs[" + std::to_string(k) + "]";
            const auto& gj = graphs[k];
            // Row width is checked against the declared attr_dim.
            if (gj.contains("x") && gj["x"].is_array() && !gj["x"].empty() && gj["x"][0].is_array() &&
                gj["x"][0].size() != d.attr_dim) {
                throw Error(ErrorCode::validation_error, field + ".x: attr_dim " + std::to_string(gj["x"][0].size()) +
                                                             " != dataset attr_dim " + std::to_string(d.attr_dim));
            }
            d.graphs.push_back(graph_from_json(gj, d.attr_dim, field));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::parse_error, ex.what());
    }
    d.validate();
    return d;
}

inline void save_dataset(const Dataset& d, const std::filesystem::path& path)
{
    io::write_file_atomic(path, dataset_to_json(d).dump() + "\n");
}

inline Dataset load_dataset(const std::filesystem::path& path)
{
    const auto text = io::read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw Error(ErrorCode::parse_error, path.string() + ": " + ex.what());
    }
    return dataset_from_json(j);
}

} // namespace illuminati

#endif // ILLUMINATI_DATASET_HPP
