#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace illuminati;
namespace support = illuminati::test_support;

namespace {

Dataset repeated(const std::vector<std::pair<AttributedGraph, std::size_t>>& items)
{
    Dataset d;
    d.name = "toy";
    d.num_classes = 2;
    d.attr_dim = items.front().first.attr_dim();
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto g = items[i].first;
        g.set_label(items[i].second);
        g.set_graph_id("toy-" + std::to_string(i));
        d.graphs.push_back(g);
        d.split.train.push_back(i);
    }
    return d;
}

} // namespace

TEST(Train, MemorizesSingleRepeatedGraph)
{
    std::mt19937_64 rng(1);
    const auto g = support::random_graph(rng, 5, 3, 0.5, Directedness::undirected);
    const auto data = repeated({{g, 1}, {g, 1}, {g, 1}});
    ArchitectureSpec arch{3, 2, {8, 8}, {}};
    const auto result = train(arch, data, {0.01, 400, 3});
    EXPECT_LT(result.trace.back().loss, 1e-3);
    EXPECT_EQ(accuracy(result.model, data, data.split.train), 1.0);
}

TEST(Train, IdenticalGraphsWithDifferentLabelsGiveHalfAccuracy)
{
    std::mt19937_64 rng(2);
    const auto g = support::random_graph(rng, 4, 2, 0.5, Directedness::undirected);
    const auto data = repeated({{g, 0}, {g, 1}});
    const auto result = train(ArchitectureSpec{2, 2, {4}, {}}, data, {0.01, 50, 0});
    EXPECT_EQ(accuracy(result.model, data, data.split.train), 0.5);
}

TEST(Train, DeterministicGivenSeed)
{
    const auto data = generate_ba2motifs(20, 4);
    const TrainOptions opt{0.01, 5, 9};
    const auto a = train(ArchitectureSpec{10, 2, {6, 6}, {}}, data, opt);
    const auto b = train(ArchitectureSpec{10, 2, {6, 6}, {}}, data, opt);
    EXPECT_EQ(model_to_json(a.model).dump(), model_to_json(b.model).dump());
    const auto c = train(ArchitectureSpec{10, 2, {6, 6}, {}}, data, {0.01, 5, 10});
    EXPECT_NE(model_to_json(a.model).dump(), model_to_json(c.model).dump());
}

TEST(Train, Errors)
{
    Dataset empty;
    try {
        train(ArchitectureSpec{1, 2, {2}, {}}, empty, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::empty_dataset);
    }
    std::mt19937_64 rng(3);
    auto g = support::random_graph(rng, 4, 2, 0.5, Directedness::undirected);
    auto data = repeated({{g, 0}, {g, 1}});
    try {
        train(ArchitectureSpec{2, 2, {4}, {}}, data, {1e308, 3, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::non_finite_loss);
    }
}

TEST(Adam, FirstStepMovesByLearningRate)
{
    Adam adam(2, AdamOptions{0.1});
    Vector p = Vector::Zero(2);
    adam.step(p, (Vector(2) << 3.0, -0.5).finished());
    EXPECT_NEAR(p[0], -0.1, 1e-8);
    EXPECT_NEAR(p[1], 0.1, 1e-8);
}
