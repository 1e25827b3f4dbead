#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace stwalk;

namespace {

StwalkParams small_params(int tau, std::size_t dim = 16) {
    StwalkParams p;
    p.tau = tau;
    p.walk_length = 10;
    p.space_walk_length = 10;
    p.time_walk_length = 10;
    p.restarts = 5;
    p.train.dim = dim;
    p.train.window = 3;
    p.seed = 3;
    return p;
}

oracle::EdgeLists cycle(int n, int steps) {
    std::vector<oracle::Edge> ring;
    for (int i = 0; i < n; ++i) {
        ring.emplace_back("c" + std::to_string(i), "c" + std::to_string((i + 1) % n));
    }
    return oracle::EdgeLists(static_cast<std::size_t>(steps), ring);
}

double cosine(std::span<const double> a, std::span<const double> b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

double mean_pairwise_cosine(const std::vector<Vector>& vs) {
    double total = 0;
    int pairs = 0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            total += cosine(vs[i], vs[j]);
            ++pairs;
        }
    }
    return total / pairs;
}

}

TEST(Combine, Examples) {
    EXPECT_EQ(combine(std::vector<double>{ 1, 2 }, std::vector<double>{ 3, 4 }), (Vector{ 4, 6 }));
    Vector v{ 0.25, -3, 7 };
    EXPECT_EQ(combine(v, Vector(3, 0.0)), v);
    Rng rng(1);
    std::normal_distribution<double> normal;
    for (int i = 0; i < 20; ++i) {
        Vector a(5), b(5);
        for (auto& x : a) {
            x = normal(rng);
        }
        for (auto& x : b) {
            x = normal(rng);
        }
        EXPECT_EQ(combine(a, b), combine(b, a));
    }
    EXPECT_THROW(combine(Vector(2), Vector(3)), ValidationError);
}

TEST(Stwalk1, VertexTransitiveCycleVectorsAreSimilar) {
    auto g = oracle::build(cycle(6, 3));
    auto params = small_params(2, 16);
    params.restarts = 40;
    params.train.epochs = 5;
    auto emb = stwalk1(g, 3, params);
    ASSERT_EQ(emb.size(), 6u);

    Rng rng(params.seed);
    std::uniform_real_distribution<double> init(-0.5 / 16, 0.5 / 16);
    std::vector<Vector> control(6, Vector(16));
    for (auto& v : control) {
        for (auto& x : v) {
            x = init(rng);
        }
    }
    EXPECT_GT(mean_pairwise_cosine(emb.vectors), mean_pairwise_cosine(control));
}

TEST(Stwalk1, EdgelessGraphStillTrains) {
    oracle::EdgeLists none(2);
    auto g = oracle::build(none, { { "a", "b", "c" }, { "a", "b", "c" } });
    auto emb = stwalk1(g, 2, small_params(1, 8));
    EXPECT_EQ(emb.size(), 3u);
    for (const auto& v : emb.vectors) {
        ASSERT_EQ(v.size(), 8u);
        for (double x : v) {
            EXPECT_TRUE(std::isfinite(x));
        }
    }
}

TEST(Stwalk1, DeterministicAndDimensioned) {
    auto data = generate_planted(SynthConfig{ .nodes = 30, .steps = 4, .seed = 2 });
    auto p = small_params(2, 12);
    auto a = stwalk1(data.graph, 4, p);
    auto b = stwalk1(data.graph, 4, p);
    EXPECT_EQ(a.vectors, b.vectors);
    EXPECT_EQ(a.nodes, b.nodes);
    EXPECT_EQ(a.dim, 12u);
    for (const auto& v : a.vectors) {
        EXPECT_EQ(v.size(), 12u);
    }
    p.threads = 3;
    EXPECT_EQ(stwalk1(data.graph, 4, p).vectors, a.vectors);
}

TEST(Stwalk2, EqualsSumOfComponentTables) {
    auto data = generate_planted(SynthConfig{ .nodes = 30, .steps = 4, .seed = 5 });
    auto res = stwalk2_detailed(data.graph, 4, small_params(3, 10));
    ASSERT_EQ(res.trajectory.size(), data.graph.present_nodes(4).size());
    for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
        Token tok{ res.trajectory.nodes[i], 4 };
        auto s = res.space.input(tok);
        auto t = res.time.input(tok);
        for (std::size_t k = 0; k < 10; ++k) {
            EXPECT_EQ(res.trajectory.vectors[i][k], s[k] + t[k]);
        }
    }
    EXPECT_EQ(stwalk2(data.graph, 4, small_params(3, 10)).vectors, res.trajectory.vectors);
}

TEST(Stwalk, AbsentNodesSkippedWithWarning) {
    auto g = oracle::build({ { { "a", "b" }, { "b", "c" } }, { { "a", "b" } } });
    std::vector<std::string> warnings;
    Log::set_sink([&](std::string_view m) { warnings.emplace_back(m); });
    auto e1 = stwalk1(g, 2, small_params(1, 4));
    auto e2 = stwalk2(g, 2, small_params(1, 4));
    Log::set_sink([](std::string_view m) { std::cerr << "warning: " << m << '\n'; });
    EXPECT_EQ(e1.nodes, (std::vector<NodeId>{ g.id("a"), g.id("b") }));
    EXPECT_EQ(e2.nodes, e1.nodes);
    EXPECT_EQ(warnings.size(), 2u);
}

TEST(Stwalk, ParameterAndWindowErrors) {
    auto g = oracle::build(cycle(4, 3));
    auto p = small_params(3);
    EXPECT_THROW(stwalk1(g, 3, p), WindowError);
    EXPECT_THROW(stwalk2(g, 3, p), WindowError);
    p.tau = 0;
    EXPECT_THROW(stwalk1(g, 3, p), ValidationError);
    p = small_params(1);
    p.restarts = 0;
    EXPECT_THROW(stwalk2(g, 3, p), ValidationError);
    p = small_params(1);
    p.train.dim = 0;
    EXPECT_THROW(stwalk1(g, 3, p), ValidationError);
}

TEST(Stwalk, NamedTokens) {
    auto g = oracle::build(cycle(3, 2));
    auto named = stwalk2(g, 2, small_params(1, 4)).named(g);
    EXPECT_EQ(named.tokens, (std::vector<std::string>{ "c0@2", "c1@2", "c2@2" }));
    EXPECT_EQ(named.dim, 4u);
}
