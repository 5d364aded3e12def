#ifndef ILLUMINATI_TRAINER_HPP
#define ILLUMINATI_TRAINER_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "optimizer.hpp"

namespace illuminati {

/// Layer widths for a GCN classifier. The readout doubles the last GCN
/// width; head_hidden lists relu layers before the identity logit layer.
struct ArchitectureSpec {
    std::size_t attr_dim = 0;
    std::size_t num_classes = 2;
    std::vector<std::size_t> gcn_hidden{20, 20, 20};
    std::vector<std::size_t> head_hidden{};
};

struct TrainOptions {
    double learning_rate = 1e-3;
    std::size_t epochs = 300;
    std::uint64_t seed = 0;
};

struct EpochStats {
    std::size_t epoch = 0;
    double loss = 0.0;
    double train_accuracy = 0.0;
    double validation_accuracy = 0.0;
};

struct TrainResult {
    GnnModel model;
    std::vector<EpochStats> trace;
};

/// Glorot-uniform weights and zero biases, deterministic in seed.
inline GnnModel init_model(const ArchitectureSpec& arch, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    auto make = [&](std::size_t in, std::size_t out, Activation act) {
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        DenseLayer layer;
        layer.weight.resize(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out));
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = dist(rng);
        }
        layer.bias = Vector::Zero(static_cast<Eigen::Index>(out));
        layer.activation = act;
        return layer;
    };
    GnnModel model;
    model.attr_dim = arch.attr_dim;
    model.num_classes = arch.num_classes;
    std::size_t dim = arch.attr_dim;
    for (auto width : arch.gcn_hidden) {
        model.gcn_layers.push_back(make(dim, width, Activation::relu));
        dim = width;
    }
    dim *= 2;
    for (auto width : arch.head_hidden) {
        model.head_layers.push_back(make(dim, width, Activation::relu));
        dim = width;
    }
    model.head_layers.push_back(make(dim, arch.num_classes, Activation::identity));
    model.validate();
    return model;
}

namespace detail {

template <typename Visit>
void for_each_block(GnnModel& model, Visit&& visit)
{
    for (auto& l : model.gcn_layers) {
        visit(l.weight.data(), l.weight.size());
        visit(l.bias.data(), l.bias.size());
    }
    for (auto& l : model.head_layers) {
        visit(l.weight.data(), l.weight.size());
        visit(l.bias.data(), l.bias.size());
    }
}

inline Eigen::Index parameter_count(GnnModel& model)
{
    Eigen::Index total = 0;
    for_each_block(model, [&](double*, Eigen::Index size) { total += size; });
    return total;
}

inline Vector flatten_parameters(GnnModel& model)
{
    Vector out(parameter_count(model));
    Eigen::Index at = 0;
    for_each_block(model, [&](double* p, Eigen::Index size) {
        out.segment(at, size) = Eigen::Map<Vector>(p, size);
        at += size;
    });
    return out;
}

inline void assign_parameters(GnnModel& model, const Vector& flat)
{
    Eigen::Index at = 0;
    for_each_block(model, [&](double* p, Eigen::Index size) {
        Eigen::Map<Vector>(p, size) = flat.segment(at, size);
        at += size;
    });
}

inline void accumulate(Vector& flat, const ModelGradient& grad, double scale)
{
    Eigen::Index at = 0;
    auto add = [&](const auto& block) {
        flat.segment(at, block.size()) += scale * Eigen::Map<const Vector>(block.data(), block.size());
        at += block.size();
    };
    for (const auto& l : grad.gcn_layers) {
        add(l.weight);
        add(l.bias);
    }
    for (const auto& l : grad.head_layers) {
        add(l.weight);
        add(l.bias);
    }
}

} // namespace detail

inline double accuracy(const GnnModel& model, const Dataset& data, const std::vector<std::size_t>& indices)
{
    if (indices.empty()) return 0.0;
    std::size_t correct = 0;
    for (auto i : indices) {
        const auto& g = data.graphs[i];
        if (g.label() && forward(model, g).predicted_class == *g.label()) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(indices.size());
}

/// Full-batch Adam on mean cross-entropy over the training split.
inline TrainResult train(const ArchitectureSpec& arch, const Dataset& data, const TrainOptions& options)
{
    if (data.graphs.empty() || data.split.train.empty()) throw Error(ErrorCode::empty_dataset, "no training graphs");
    for (auto i : data.split.train) {
        if (!data.graphs[i].label()) throw Error(ErrorCode::validation_error, "unlabelled training graph " + data.graphs[i].graph_id());
    }
    TrainResult result{init_model(arch, options.seed), {}};
    GnnModel& model = result.model;
    Vector params = detail::flatten_parameters(model);
    Adam adam(params.size(), AdamOptions{options.learning_rate});
    const double scale = 1.0 / static_cast<double>(data.split.train.size());

    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        Vector grad = Vector::Zero(params.size());
        double total_loss = 0.0;
        std::size_t correct = 0;
        for (auto i : data.split.train) {
            const auto& g = data.graphs[i];
            const auto target = *g.label();
            const auto trace = forward_trace(model, g);
            total_loss += cross_entropy(trace.result.probabilities, target);
            if (trace.result.predicted_class == target) ++correct;
            const Vector d_logits = cross_entropy_logit_gradient(trace.result.probabilities, target);
            detail::accumulate(grad, *backward(model, g, trace, d_logits, true, false).model, scale);
        }
        const double mean_loss = total_loss * scale;
        if (!std::isfinite(mean_loss) || !grad.allFinite()) {
            throw Error(ErrorCode::non_finite_loss, "epoch " + std::to_string(epoch) + " loss " + std::to_string(mean_loss));
        }
        EpochStats stats;
        stats.epoch = epoch;
        stats.loss = mean_loss;
        stats.train_accuracy = static_cast<double>(correct) * scale;
        stats.validation_accuracy = accuracy(model, data, data.split.validation);
        result.trace.push_back(stats);

        adam.step(params, grad);
        detail::assign_parameters(model, params);
    }
    return result;
}

} // namespace illuminati

#endif // ILLUMINATI_TRAINER_HPP
