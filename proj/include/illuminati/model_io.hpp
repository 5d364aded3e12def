#ifndef ILLUMINATI_MODEL_IO_HPP
#define ILLUMINATI_MODEL_IO_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dataset.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "model.hpp"

namespace illuminati {

inline constexpr int model_format_version = 1;

namespace detail {

inline nlohmann::json layer_to_json(const DenseLayer& layer)
{
    nlohmann::json j;
    j["weight"] = matrix_to_json(layer.weight);
    j["bias"] = std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size());
    j["activation"] = std::string(to_string(layer.activation));
    return j;
}

inline DenseLayer layer_from_json(const nlohmann::json& j, const std::string& field)
{
    DenseLayer layer;
    const auto& w = j.at("weight");
    if (!w.is_array() || w.empty() || !w[0].is_array()) throw Error(ErrorCode::parse_error, field + ".weight: expected 2-D array");
    layer.weight = matrix_from_json(w, w[0].size(), field + ".weight");
    const auto bias = j.at("bias").get<std::vector<double>>();
    layer.bias = Eigen::Map<const Vector>(bias.data(), static_cast<Eigen::Index>(bias.size()));
    layer.activation = parse_activation(j.at("activation").get<std::string>());
    return layer;
}

} // namespace detail

/// JSON serialization. Doubles are written in shortest round-trip form, so
/// load(save(m)) reproduces every weight bit for bit.
inline nlohmann::json model_to_json(const GnnModel& model)
{
    nlohmann::json j;
    j["format_version"] = model_format_version;
    j["attr_dim"] = model.attr_dim;
    j["num_classes"] = model.num_classes;
    j["readout"] = "max_mean_concat";
    j["gcn_layers"] = nlohmann::json::array();
    for (const auto& l : model.gcn_layers) j["gcn_layers"].push_back(detail::layer_to_json(l));
    j["head_layers"] = nlohmann::json::array();
    for (const auto& l : model.head_layers) j["head_layers"].push_back(detail::layer_to_json(l));
    return j;
}

inline GnnModel model_from_json(const nlohmann::json& j)
{
    GnnModel model;
    try {
        const auto version = j.at("format_version").get<int>();
        if (version != model_format_version) throw Error(ErrorCode::format_version, "model format_version " + std::to_string(version));
        if (j.at("readout").get<std::string>() != "max_mean_concat") {
            throw Error(ErrorCode::parse_error, "unsupported readout " + j.at("readout").get<std::string>());
        }
        model.attr_dim = j.at("attr_dim").get<std::size_t>();
        model.num_classes = j.at("num_classes").get<std::size_t>();
        const auto& gcn = j.at("gcn_layers");
        for (std::size_t l = 0; l < gcn.size(); ++l) {
            model.gcn_layers.push_back(detail::layer_from_json(gcn[l], "gcn_layers[" + std::to_string(l) + "]"));
        }
        const auto& head = j.at("head_layers");
        for (std::size_t l = 0; l < head.size(); ++l) {
            model.head_layers.push_back(detail::layer_from_json(head[l], "head_layers[" + std::to_string(l) + "]"));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::parse_error, ex.what());
    }
    model.validate();
    return model;
}

inline void save_model(const GnnModel& model, const std::filesystem::path& path)
{
    io::write_file_atomic(path, model_to_json(model).dump(1) + "\n");
}

inline GnnModel load_model(const std::filesystem::path& path)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::parse_error& ex) {
        throw Error(ErrorCode::parse_error, path.string() + ": " + ex.what());
    }
    return model_from_json(j);
}

} // namespace illuminati

#endif // ILLUMINATI_MODEL_IO_HPP
