#ifndef ILLUMINATI_EXPLANATION_IO_HPP
#define ILLUMINATI_EXPLANATION_IO_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dataset.hpp"
#include "errors.hpp"
#include "explainer.hpp"
#include "io.hpp"

namespace illuminati {

inline nlohmann::json config_to_json(const ExplainConfig& c)
{
    nlohmann::json j;
    j["epochs"] = c.epochs;
    j["learning_rate"] = c.learning_rate;
    j["lambda_edge_size"] = c.lambda_edge_size;
    j["lambda_attr_size"] = c.lambda_attr_size;
    j["lambda_edge_entropy"] = c.lambda_edge_entropy;
    j["lambda_attr_entropy"] = c.lambda_attr_entropy;
    j["init_std"] = c.init_std;
    j["agg1"] = std::string(to_string(c.agg1));
    j["agg2"] = std::string(to_string(c.agg2));
    j["pair_agg"] = std::string(to_string(c.pair_agg));
    j["mode"] = std::string(to_string(c.mode));
    j["edge_sharing"] = std::string(to_string(c.sharing.edges));
    j["attribute_sharing"] = std::string(to_string(c.sharing.attributes));
    j["beta"] = c.hard_concrete.beta;
    j["stretch_low"] = c.hard_concrete.stretch_low;
    j["stretch_high"] = c.hard_concrete.stretch_high;
    j["stochastic"] = c.hard_concrete.stochastic;
    return j;
}

inline ExplainConfig config_from_json(const nlohmann::json& j, std::uint64_t seed)
{
    ExplainConfig c;
    c.epochs = j.at("epochs").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.lambda_edge_size = j.at("lambda_edge_size").get<double>();
    c.lambda_attr_size = j.at("lambda_attr_size").get<double>();
    c.lambda_edge_entropy = j.at("lambda_edge_entropy").get<double>();
    c.lambda_attr_entropy = j.at("lambda_attr_entropy").get<double>();
    c.init_std = j.value("init_std", c.init_std);
    c.agg1 = parse_aggregation(j.at("agg1").get<std::string>());
    c.agg2 = parse_aggregation(j.at("agg2").get<std::string>());
    c.pair_agg = parse_aggregation(j.at("pair_agg").get<std::string>());
    c.mode = parse_mode(j.at("mode").get<std::string>());
    c.sharing.edges = parse_edge_sharing(j.at("edge_sharing").get<std::string>());
    c.sharing.attributes = parse_attribute_sharing(j.at("attribute_sharing").get<std::string>());
    c.hard_concrete.beta = j.at("beta").get<double>();
    c.hard_concrete.stretch_low = j.at("stretch_low").get<double>();
    c.hard_concrete.stretch_high = j.at("stretch_high").get<double>();
    c.hard_concrete.stochastic = j.at("stochastic").get<bool>();
    c.hard_concrete.seed = seed;
    return c;
}

inline nlohmann::json explanation_to_json(const Explanation& e, const AttributedGraph& g, const ExplainConfig& config)
{
    nlohmann::json j;
    j["graph_id"] = e.graph_id;
    j["predicted_class"] = e.original_prediction;
    j["probability"] = e.original_probability;
    j["node_scores"] = e.node_score;
    j["node_attr_scores"] = e.node_attr_score;
    j["node_ranking"] = e.node_ranking;
    auto edges = nlohmann::json::array();
    for (std::size_t a = 0; a < g.arc_count(); ++a) {
        edges.push_back({{"src", g.arcs()[a].src}, {"dst", g.arcs()[a].dst}, {"score", e.edge_score[a]}});
    }
    j["edge_scores"] = std::move(edges);
    j["attr_scores"] = matrix_to_json(e.attr_score);
    j["config"] = config_to_json(config);
    j["seed"] = config.hard_concrete.seed;
    return j;
}

struct LoadedExplanation {
    Explanation explanation;
    ExplainConfig config;
    std::vector<Arc> arcs;
};

inline LoadedExplanation explanation_from_json(const nlohmann::json& j)
{
    LoadedExplanation out;
    auto& e = out.explanation;
    try {
        e.graph_id = j.at("graph_id").get<std::string>();
        e.original_prediction = j.at("predicted_class").get<std::size_t>();
        e.original_probability = j.at("probability").get<double>();
        e.node_score = j.at("node_scores").get<std::vector<double>>();
        e.node_attr_score = j.at("node_attr_scores").get<std::vector<double>>();
        e.node_ranking = j.at("node_ranking").get<std::vector<std::size_t>>();
        for (const auto& edge : j.at("edge_scores")) {
            out.arcs.push_back({edge.at("src").get<std::size_t>(), edge.at("dst").get<std::size_t>()});
            e.edge_score.push_back(edge.at("score").get<double>());
        }
        const auto& attrs = j.at("attr_scores");
        const std::size_t cols = attrs.empty() ? 0 : attrs[0].size();
        e.attr_score = matrix_from_json(attrs, cols, "attr_scores");
        out.config = config_from_json(j.at("config"), j.at("seed").get<std::uint64_t>());
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::parse_error, ex.what());
    }
    return out;
}

inline std::string explanation_file_name(const std::string& graph_id) { return graph_id + ".json"; }

inline void save_explanation(const Explanation& e, const AttributedGraph& g, const ExplainConfig& config,
                             const std::filesystem::path& path)
{
    io::write_file_atomic(path, explanation_to_json(e, g, config).dump(1) + "\n");
}

inline LoadedExplanation load_explanation(const std::filesystem::path& path)
{
    try {
        return explanation_from_json(nlohmann::json::parse(io::read_file(path)));
    } catch (const nlohmann::json::parse_error& ex) {
        throw Error(ErrorCode::parse_error, path.string() + ": " + ex.what());
    }
}

} // namespace illuminati

#endif // ILLUMINATI_EXPLANATION_IO_HPP
