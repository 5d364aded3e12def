#include <gtest/gtest.h>

#include <random>
#include <set>

#include "test_support.hpp"

using namespace illuminati;
namespace support = illuminati::test_support;

TEST(ForEachSubset, LexicographicAndComplete)
{
    std::vector<std::vector<std::size_t>> seen;
    oracle::for_each_subset(4, 2, [&](const std::vector<std::size_t>& s) { seen.push_back(s); });
    EXPECT_EQ(seen, (std::vector<std::vector<std::size_t>>{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
    std::size_t count = 0;
    oracle::for_each_subset(10, 4, [&](const std::vector<std::size_t>&) { ++count; });
    EXPECT_EQ(count, 210u);
    count = 0;
    oracle::for_each_subset(3, 0, [&](const std::vector<std::size_t>& s) { count += s.empty(); });
    EXPECT_EQ(count, 1u);
    count = 0;
    oracle::for_each_subset(3, 4, [&](const std::vector<std::size_t>&) { ++count; });
    EXPECT_EQ(count, 0u);
}

TEST(BruteForce, FullAndEmptySubsets)
{
    std::mt19937_64 rng(1);
    const auto m = support::random_model(rng, 2, {5, 5}, {}, 2);
    const auto g = support::random_graph(rng, 6, 2, 0.5, Directedness::undirected);
    const auto original = forward(m, g);
    const auto cls = static_cast<Eigen::Index>(original.predicted_class);
    const auto full = oracle::brute_force_best_subset(m, g, 6);
    EXPECT_EQ(full.nodes.size(), 6u);
    EXPECT_EQ(full.probability, original.probabilities[cls]);
    const auto none = oracle::brute_force_best_subset(m, g, 0);
    EXPECT_EQ(none.nodes.size(), 0u);
    EXPECT_EQ(none.probability, forward(m, empty_graph(2)).probabilities[cls]);
}

TEST(BruteForce, DominatesRandomSubsets)
{
    std::mt19937_64 rng(2);
    for (int t = 0; t < 10; ++t) {
        const auto m = support::random_model(rng, 3, {6, 6}, {}, 2);
        const std::size_t n = 5 + t % 6;
        const auto g = support::random_graph(rng, n, 3, 0.4, Directedness::undirected);
        const std::size_t k = 1 + t % 4;
        const auto best = oracle::brute_force_best_subset(m, g, k);
        const auto cls = forward(m, g).predicted_class;
        std::vector<std::size_t> nodes(n);
        std::iota(nodes.begin(), nodes.end(), std::size_t{0});
        for (int s = 0; s < 100; ++s) {
            std::shuffle(nodes.begin(), nodes.end(), rng);
            const NodeSet pick(std::vector<std::size_t>(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(k)));
            EXPECT_GE(best.probability, oracle::subset_probability(m, g, pick, cls));
        }
    }
}

TEST(BruteForce, TiesGoToFirstSubset)
{
    // Edgeless graph with identical nodes: every subset scores the same.
    GnnModel m;
    m.attr_dim = 1;
    m.num_classes = 2;
    m.gcn_layers.push_back({Matrix::Constant(1, 1, 1.0), Vector::Zero(1), Activation::relu});
    m.head_layers.push_back({Matrix::Constant(2, 2, 1.0), Vector::Zero(2), Activation::identity});
    const auto g = build_graph(5, {}, Matrix::Ones(5, 1), Directedness::undirected);
    EXPECT_EQ(oracle::brute_force_best_subset(m, g, 2).nodes.members(), (std::vector<std::size_t>{0, 1}));
}

TEST(Oracle, SizeGuard)
{
    std::mt19937_64 rng(3);
    const auto m = support::random_model(rng, 1, {3}, {}, 2);
    const auto g = support::random_graph(rng, 15, 1, 0.2, Directedness::undirected, "big");
    for (auto call : {+[](const GnnModel& mm, const AttributedGraph& gg) { oracle::brute_force_best_subset(mm, gg, 3); },
                      +[](const GnnModel& mm, const AttributedGraph& gg) { oracle::exhaustive_sparsity(mm, gg); }}) {
        try {
            call(m, g);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::too_large);
        }
    }
    EXPECT_NO_THROW(oracle::occlusion_scores(m, g));
}

TEST(ExhaustiveSparsity, BoundsAndDominance)
{
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        const auto m = support::random_model(rng, 2, {5, 5}, {}, 2);
        const std::size_t n = 2 + t % 8;
        const auto g = support::random_graph(rng, n, 2, 0.4, Directedness::undirected);
        const auto cls = forward(m, g).predicted_class;
        const auto k = oracle::exhaustive_sparsity(m, g);
        EXPECT_GE(k, 1u);
        EXPECT_LE(k, n);
        for (int r = 0; r < 5; ++r) {
            std::vector<std::size_t> ranking(n);
            std::iota(ranking.begin(), ranking.end(), std::size_t{0});
            std::shuffle(ranking.begin(), ranking.end(), rng);
            EXPECT_LE(k, ranking_min_k(m, g, ranking, cls));
        }
    }
}

TEST(ExhaustiveSparsity, SingletonRetains)
{
    GnnModel m;
    m.attr_dim = 1;
    m.num_classes = 2;
    m.gcn_layers.push_back({Matrix::Constant(1, 1, 1.0), Vector::Zero(1), Activation::relu});
    Matrix head = Matrix::Zero(2, 2);
    head(0, 1) = 1.0;
    m.head_layers.push_back({head, (Vector(2) << 0.0, -0.5).finished(), Activation::identity});
    const auto g = build_graph(3, {}, (Matrix(3, 1) << 0.0, 0.0, 1.0).finished(), Directedness::undirected);
    EXPECT_EQ(oracle::exhaustive_sparsity(m, g), 1u);
}

TEST(Occlusion, Examples)
{
    std::mt19937_64 rng(5);
    const auto m = support::random_model(rng, 2, {4}, {}, 2);
    EXPECT_TRUE(oracle::occlusion_scores(m, build_graph(3, {}, Matrix::Ones(3, 2), Directedness::undirected)).empty());

    // With one GCN layer, arc 2->3 only touches node 3, which the crafted
    // model reads like any other node; arcs out of zero-attribute nodes into
    // nodes that are never read are inert.
    const auto crafted = support::crafted_model();
    Matrix x = Matrix::Zero(4, 1);
    x(0, 0) = 1.0;
    const auto g = build_graph(4, {{0, 1}, {2, 3}}, x, Directedness::directed);
    const auto drop = oracle::occlusion_scores(crafted, g);
    EXPECT_GT(drop[0], 0.0);
    EXPECT_EQ(drop[1], 0.0);

    // Star with identical leaves: automorphic edges drop equally.
    Matrix s(3, 2);
    s << 0.3, -0.2, 0.7, 0.1, 0.7, 0.1;
    const auto star = build_graph(3, {{0, 1}, {0, 2}}, s, Directedness::undirected);
    const auto sd = oracle::occlusion_scores(m, star);
    EXPECT_EQ(sd[0], sd[1]);
    EXPECT_NEAR(sd[0], sd[2], 1e-15);
}

TEST(Oracle, JsonHasAllFields)
{
    std::mt19937_64 rng(6);
    const auto m = support::random_model(rng, 2, {4}, {}, 2);
    const auto g = support::random_graph(rng, 5, 2, 0.5, Directedness::undirected, "o");
    const auto j = oracle::oracle_to_json(oracle::run_oracle(m, g, 2));
    for (const char* key : {"graph_id", "k", "best_subset", "best_probability", "exhaustive_min_k", "occlusion_drop"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
}
