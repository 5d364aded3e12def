#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "test_support.hpp"

using namespace illuminati;
namespace support = illuminati::test_support;

namespace {

Explanation ranked(const AttributedGraph& g, std::vector<std::size_t> ranking)
{
    Explanation e;
    e.graph_id = g.graph_id();
    e.node_ranking = std::move(ranking);
    e.attr_score = Matrix::Ones(static_cast<Eigen::Index>(g.node_count()), static_cast<Eigen::Index>(g.attr_dim()));
    return e;
}

Explanation identity_ranking(const AttributedGraph& g)
{
    std::vector<std::size_t> r(g.node_count());
    std::iota(r.begin(), r.end(), std::size_t{0});
    return ranked(g, r);
}

/// Head reads only the max-pool channel of a one-layer identity GCN on a
/// single attribute: logit_1 = max_i h_i - 0.5. Predicts 1 iff some node's
/// smoothed value exceeds 0.5; the empty graph predicts 0.
GnnModel threshold_model()
{
    GnnModel m;
    m.attr_dim = 1;
    m.num_classes = 2;
    m.gcn_layers.push_back({Matrix::Constant(1, 1, 1.0), Vector::Zero(1), Activation::relu});
    Matrix head = Matrix::Zero(2, 2);
    head(0, 1) = 1.0;
    m.head_layers.push_back({head, (Vector(2) << 0.0, -0.5).finished(), Activation::identity});
    m.validate();
    return m;
}

std::vector<AttributedGraph> random_suite(std::mt19937_64& rng, std::size_t count, std::size_t d)
{
    std::vector<AttributedGraph> gs;
    for (std::size_t i = 0; i < count; ++i) {
        gs.push_back(support::random_graph(rng, 2 + i % 8, d, 0.4, Directedness::undirected, "g" + std::to_string(i)));
    }
    return gs;
}

} // namespace

TEST(Budget, Examples)
{
    const auto g = build_graph(4, {}, Matrix::Ones(4, 1), Directedness::directed);
    const auto top = extract_topk_nodes(ranked(g, {3, 1, 0, 2}), Budget::top_k(2));
    EXPECT_FALSE(top.skipped);
    EXPECT_EQ(top.nodes.members(), (std::vector<std::size_t>{1, 3}));
    EXPECT_EQ(resolve_budget(5, Budget::top_rate(0.5)), 3u);
    EXPECT_EQ(resolve_budget(6, Budget::top_k(10)), std::nullopt);
    EXPECT_EQ(resolve_budget(6, Budget::top_k(6)), 6u);
    EXPECT_EQ(resolve_budget(3, Budget::top_rate(0.01)), 1u);
    EXPECT_EQ(resolve_budget(4, Budget::top_rate(0.625)), 3u);
    EXPECT_EQ(resolve_budget(7, Budget::full()), 7u);
    EXPECT_EQ(resolve_budget(7, Budget::top_k(0)), 0u);
    for (double bad : {0.0, -0.5, 1.5}) {
        try {
            resolve_budget(5, Budget::top_rate(bad));
            FAIL() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::invalid_budget);
        }
    }
}

TEST(DefaultPrediction, Examples)
{
    GnnModel m;
    m.attr_dim = 2;
    m.num_classes = 2;
    m.gcn_layers.push_back({Matrix::Zero(2, 3), Vector::Zero(3), Activation::relu});
    m.head_layers.push_back({Matrix::Zero(6, 2), (Vector(2) << 0.3, -0.3).finished(), Activation::identity});
    EXPECT_EQ(default_prediction(m), 0u);
    m.head_layers[0].bias << -0.3, 0.3;
    EXPECT_EQ(default_prediction(m), 1u);
    m.head_layers[0].bias.setZero();
    EXPECT_EQ(default_prediction(m), 0u);
    std::mt19937_64 rng(1);
    const auto r = support::random_model(rng, 3, {5, 5}, {4}, 3);
    EXPECT_EQ(default_prediction(r), default_prediction(r));
}

TEST(EpExplained, FullBudgetIsOne)
{
    std::mt19937_64 rng(2);
    const auto m = support::random_model(rng, 3, {6, 6}, {}, 2);
    const auto gs = random_suite(rng, 25, 3);
    std::vector<Explanation> es;
    for (const auto& g : gs) es.push_back(identity_ranking(g));
    EXPECT_EQ(ep_explained(m, gs, es, Budget::full()), 1.0);
    EXPECT_EQ(ep_remaining(m, gs, es, Budget::top_k(0)), 1.0);
}

TEST(EpExplained, HalfRetained)
{
    // Graph a: node 1 holds the evidence, so keeping node 0 alone loses it.
    // Graph b: node 0 holds the evidence and is kept.
    const auto m = threshold_model();
    const auto a = build_graph(2, {}, (Matrix(2, 1) << 0.0, 1.0).finished(), Directedness::undirected, std::nullopt, "a");
    const auto b = build_graph(2, {}, (Matrix(2, 1) << 1.0, 0.0).finished(), Directedness::undirected, std::nullopt, "b");
    const std::vector<AttributedGraph> gs{a, b};
    const std::vector<Explanation> es{ranked(a, {0, 1}), ranked(b, {0, 1})};
    EXPECT_EQ(ep_explained(m, gs, es, Budget::top_k(1)), 0.5);
    EXPECT_EQ(ep_remaining(m, gs, es, Budget::top_k(1)), 0.5);
}

TEST(EpRemaining, FullBudgetComparesDefaultPrediction)
{
    const auto m = threshold_model();
    const auto pos = build_graph(1, {}, Matrix::Ones(1, 1), Directedness::undirected, std::nullopt, "pos");
    const auto neg = build_graph(1, {}, Matrix::Zero(1, 1), Directedness::undirected, std::nullopt, "neg");
    ASSERT_EQ(default_prediction(m), 0u);
    const std::vector<AttributedGraph> gs{pos, neg};
    const std::vector<Explanation> es{identity_ranking(pos), identity_ranking(neg)};
    EXPECT_EQ(ep_remaining(m, gs, es, Budget::full()), 0.5);
}

TEST(EpExplained, SkippedGraphsLeaveDenominator)
{
    const auto m = threshold_model();
    const auto small = build_graph(1, {}, Matrix::Ones(1, 1), Directedness::undirected, std::nullopt, "small");
    const auto big = build_graph(3, {}, (Matrix(3, 1) << 0.0, 0.0, 1.0).finished(), Directedness::undirected, std::nullopt, "big");
    const std::vector<AttributedGraph> gs{small, big};
    const std::vector<Explanation> es{identity_ranking(small), identity_ranking(big)};
    // k = 2 skips the 1-node graph; the 3-node graph loses node 2.
    EXPECT_EQ(ep_explained(m, gs, es, Budget::top_k(2)), 0.0);
    const auto report = evaluate(m, gs, es, Budget::top_k(2));
    EXPECT_TRUE(report.per_graph[0].skipped);
    EXPECT_EQ(report.evaluated_count, 1u);
}

TEST(EpExplained, MissingExplanation)
{
    const auto m = threshold_model();
    const auto a = build_graph(1, {}, Matrix::Ones(1, 1), Directedness::undirected, std::nullopt, "a");
    const auto b = build_graph(1, {}, Matrix::Ones(1, 1), Directedness::undirected, std::nullopt, "b");
    const std::vector<AttributedGraph> gs{a, b};
    const std::vector<Explanation> es{identity_ranking(a)};
    try {
        ep_explained(m, gs, es, Budget::full());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::missing_explanation);
        EXPECT_NE(std::string(e.what()).find('b'), std::string::npos);
    }
}

TEST(EpExplained, AgreeingPrefixesGiveEqualEp)
{
    std::mt19937_64 rng(3);
    const auto m = support::random_model(rng, 2, {5, 5}, {}, 2);
    const auto gs = random_suite(rng, 20, 2);
    std::vector<Explanation> a, b;
    for (const auto& g : gs) {
        auto r = identity_ranking(g).node_ranking;
        std::shuffle(r.begin(), r.end(), rng);
        a.push_back(ranked(g, r));
        // Same top-2 prefix, different tail order.
        if (r.size() > 3) std::reverse(r.begin() + 2, r.end());
        b.push_back(ranked(g, r));
    }
    EXPECT_EQ(ep_explained(m, gs, a, Budget::top_k(2)), ep_explained(m, gs, b, Budget::top_k(2)));
    EXPECT_EQ(ep_remaining(m, gs, a, Budget::top_k(2)), ep_remaining(m, gs, b, Budget::top_k(2)));
}

TEST(EpAttribute, FullTopIsOneAndTieBreakIsStable)
{
    std::mt19937_64 rng(4);
    const auto m = support::random_model(rng, 4, {6}, {}, 2);
    const auto gs = random_suite(rng, 20, 4);
    std::vector<Explanation> es;
    for (const auto& g : gs) {
        auto e = identity_ranking(g);
        e.attr_score = support::random_matrix(rng, e.attr_score.rows(), 4, 0.0, 1.0);
        es.push_back(e);
    }
    EXPECT_EQ(ep_attribute(m, gs, es, 4), 1.0);
    EXPECT_EQ(ep_attribute(m, gs, es, 2), ep_attribute(m, gs, es, 2));

    const Matrix flat = Matrix::Constant(2, 4, 0.5);
    const Matrix keep = top_attribute_mask(flat, 2);
    EXPECT_EQ(keep, (Matrix(2, 4) << 1, 1, 0, 0, 1, 1, 0, 0).finished());
    const Matrix scored = (Matrix(1, 4) << 0.1, 0.9, 0.9, 0.4).finished();
    EXPECT_EQ(top_attribute_mask(scored, 2), (Matrix(1, 4) << 0, 1, 1, 0).finished());
}

TEST(EpAttribute, MissingScores)
{
    const auto m = threshold_model();
    const auto g = build_graph(1, {}, Matrix::Ones(1, 1), Directedness::undirected, std::nullopt, "g");
    auto e = identity_ranking(g);
    e.attr_score.resize(0, 0);
    const std::vector<AttributedGraph> gs{g};
    const std::vector<Explanation> es{e};
    try {
        ep_attribute(m, gs, es, 1);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.code(), ErrorCode::missing_attribute_scores);
    }
}

TEST(Sparsity, Examples)
{
    const auto m = threshold_model();
    // Evidence at node 0, ranked first: retained at k = 1.
    const auto first = build_graph(3, {}, (Matrix(3, 1) << 1.0, 0.0, 0.0).finished(), Directedness::undirected,
                                   std::nullopt, "first");
    // Evidence at node 2, ranked last: retained only with all 3 nodes.
    const auto last = build_graph(3, {}, (Matrix(3, 1) << 0.0, 0.0, 1.0).finished(), Directedness::undirected,
                                  std::nullopt, "last");
    // Predicts the default class, so it is not eligible.
    const auto neutral = build_graph(2, {}, Matrix::Zero(2, 1), Directedness::undirected, std::nullopt, "neutral");
    const std::vector<AttributedGraph> gs{first, last, neutral};
    const std::vector<Explanation> es{identity_ranking(first), identity_ranking(last), identity_ranking(neutral)};
    const auto s = sparsity(m, gs, es);
    EXPECT_EQ(s.eligible_count, 2u);
    EXPECT_EQ(s.min_k[0], 1u);
    EXPECT_EQ(s.min_k[1], 3u);
    EXPECT_EQ(s.min_k[2], std::nullopt);
    ASSERT_TRUE(s.average);
    EXPECT_EQ(*s.average, 2.0);

    const std::vector<AttributedGraph> none{neutral};
    const std::vector<Explanation> none_e{identity_ranking(neutral)};
    const auto empty = sparsity(m, none, none_e);
    EXPECT_EQ(empty.eligible_count, 0u);
    EXPECT_FALSE(empty.average);
}

TEST(Sparsity, NoProperPrefixContributesNodeCount)
{
    // logit_1 = 0.75 - mean. The 2-node graph averages 0.5 (class 1); its
    // first-ranked node alone averages 1.0 (class 0).
    GnnModel m;
    m.attr_dim = 1;
    m.num_classes = 2;
    m.gcn_layers.push_back({Matrix::Constant(1, 1, 1.0), Vector::Zero(1), Activation::relu});
    Matrix head = Matrix::Zero(2, 2);
    head(1, 1) = -1.0;
    m.head_layers.push_back({head, (Vector(2) << 0.0, 0.75).finished(), Activation::identity});
    const auto g = build_graph(2, {{0, 1}}, (Matrix(2, 1) << 1.0, 0.0).finished(), Directedness::undirected);
    ASSERT_EQ(predict(m, g), 1u);
    EXPECT_EQ(ranking_min_k(m, g, std::vector<std::size_t>{0, 1}, 1), 2u);
    EXPECT_EQ(ranking_min_k(m, g, std::vector<std::size_t>{1, 0}, 1), 1u);
}

TEST(Sparsity, MinimalAlongRanking)
{
    std::mt19937_64 rng(5);
    const auto m = support::random_model(rng, 2, {6, 6}, {}, 2);
    for (const auto& g : random_suite(rng, 30, 2)) {
        const auto e = identity_ranking(g);
        const auto original = predict(m, g);
        const auto k = ranking_min_k(m, g, e.node_ranking, original);
        EXPECT_LE(k, g.node_count());
        for (std::size_t j = 1; j < k; ++j) {
            NodeSet prefix(std::vector<std::size_t>(e.node_ranking.begin(), e.node_ranking.begin() + static_cast<std::ptrdiff_t>(j)));
            EXPECT_NE(predict(m, node_induced_subgraph(g, prefix)), original);
        }
    }
}

TEST(Evaluate, ReportMatchesIndividualMetricsAndIsStable)
{
    std::mt19937_64 rng(6);
    const auto m = support::random_model(rng, 3, {6, 6}, {}, 2);
    const auto gs = random_suite(rng, 30, 3);
    std::vector<Explanation> es;
    for (const auto& g : gs) {
        auto e = identity_ranking(g);
        std::shuffle(e.node_ranking.begin(), e.node_ranking.end(), rng);
        es.push_back(e);
    }
    const auto budget = Budget::top_rate(0.5);
    const auto r1 = evaluate(m, gs, es, budget, 2, 1);
    const auto r4 = evaluate(m, gs, es, budget, 2, 4);
    EXPECT_EQ(report_to_json(r1).dump(), report_to_json(r4).dump());
    EXPECT_EQ(r1.ep_explained, ep_explained(m, gs, es, budget));
    EXPECT_EQ(r1.ep_remaining, ep_remaining(m, gs, es, budget));
    EXPECT_EQ(r1.ep_attribute, ep_attribute(m, gs, es, 2));
    const auto s = sparsity(m, gs, es);
    EXPECT_EQ(r1.sparsity, s.average);
    EXPECT_EQ(r1.eligible_count, s.eligible_count);
    EXPECT_GE(r1.ep_explained, 0.0);
    EXPECT_LE(r1.ep_explained, 1.0);

    const auto csv = verdicts_to_csv(r1.per_graph);
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), gs.size());
    EXPECT_EQ(csv.rfind("g0,r=0.5,", 0), 0u);
}
