#ifndef STWALK_STWALK_HPP
#define STWALK_STWALK_HPP

#include <string>
#include <vector>

#include "common.hpp"
#include "embedding_io.hpp"
#include "skipgram.hpp"
#include "spacetime.hpp"
#include "temporal_graph.hpp"
#include "walks.hpp"

namespace stwalk {

struct StwalkParams {
    int tau = 5;
    /// Joint space-time walk length.
    std::size_t walk_length = 30;
    std::size_t space_walk_length = 30;
    std::size_t time_walk_length = 30;
    std::size_t restarts = 40;
    /// dim and window here are the embedding size and vocabulary window.
    TrainConfig train;
    std::uint64_t seed = 1;
    /// Workers for walk generation. Output does not depend on this.
    std::size_t threads = 1;

    void validate() const {
        if (tau < 1) {
            throw ValidationError("temporal window must be at least 1");
        }
        if (walk_length < 1 || space_walk_length < 1 || time_walk_length < 1) {
            throw ValidationError("walk lengths must be at least 1");
        }
        if (restarts < 1) {
            throw ValidationError("restarts must be at least 1");
        }
        train.validate();
    }
};

/// One vector per node for the window ending at `time`.
struct TrajectoryEmbedding {
    std::string method;
    TimeStep time = 0;
    std::size_t dim = 0;
    std::vector<NodeId> nodes;
    std::vector<Vector> vectors;

    std::size_t size() const {
        return nodes.size();
    }

    /// Tokens are "node@t".
    NamedEmbeddings named(const TemporalGraphSet& g) const {
        NamedEmbeddings out;
        out.dim = dim;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            out.add(g.token_name(Token{ nodes[i], time }), vectors[i]);
        }
        return out;
    }
};

/// f(space, time): elementwise sum.
inline Vector combine(std::span<const double> space, std::span<const double> time) {
    if (space.size() != time.size()) {
        throw ValidationError("cannot combine vectors of dimension " + std::to_string(space.size()) + " and " + std::to_string(time.size()));
    }
    Vector out(space.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = space[i] + time[i];
    }
    return out;
}

namespace detail {

inline std::vector<NodeId> anchors_at(const TemporalGraphSet& g, TimeStep t, std::string_view method) {
    auto nodes = g.present_nodes(t);
    if (nodes.size() < g.node_count()) {
        Log::warn(std::string(method) + ": skipping " + std::to_string(g.node_count() - nodes.size()) + " node(s) absent at t=" + std::to_string(t));
    }
    return nodes;
}

/**
 * `restarts` walks of at most `length` tokens from each anchor (n, t) on the
 * token graph returned by make_graph(n). Graphs are built per anchor, so
 * walk generation parallelizes over anchors.
 */
template<class MakeGraph_>
WalkCorpus anchored_corpus(const std::vector<NodeId>& anchors, TimeStep t, std::size_t length, std::size_t restarts,
                           std::uint64_t seed, std::size_t threads, MakeGraph_ make_graph)
{
    std::vector<std::vector<Walk>> per_anchor(anchors.size());
    parallel_for(anchors.size(), threads, [&](std::size_t i) {
        auto graph = make_graph(anchors[i]);
        Token start{ anchors[i], t };
        auto& walks = per_anchor[i];
        walks.reserve(restarts);
        for (std::size_t r = 0; r < restarts; ++r) {
            auto rng = make_rng(walk_seed(seed, start, r));
            walks.push_back(random_walk(graph, start, length, rng));
        }
    });
    WalkCorpus corpus;
    for (auto& walks : per_anchor) {
        for (auto& w : walks) {
            corpus.add(std::move(w));
        }
    }
    return corpus;
}

inline TrainConfig seeded(TrainConfig cfg, std::uint64_t seed) {
    cfg.seed = seed;
    return cfg;
}

}

/**
 * Joint space-time walks: one corpus holding `restarts` anchored walks over
 * every present node's space-time graph, trained once.
 */
inline TrajectoryEmbedding stwalk1(const TemporalGraphSet& g, TimeStep t, const StwalkParams& params) {
    params.validate();
    if (!g.valid_time(t) || t - params.tau < 1) {
        throw WindowError("window of size " + std::to_string(params.tau) + " ending at t=" + std::to_string(t) + " does not fit in [1, " + std::to_string(g.steps()) + "]");
    }
    auto anchors = detail::anchors_at(g, t, "stwalk1");
    auto corpus = detail::anchored_corpus(anchors, t, params.walk_length, params.restarts,
                                          derive_seed(params.seed, "stwalk1/walks", t), params.threads,
                                          [&](NodeId n) { return create_space_time_graph(g, params.tau, n, t); });
    auto table = train(corpus, detail::seeded(params.train, derive_seed(params.seed, "stwalk1/train", t)));

    TrajectoryEmbedding out{ "stwalk1", t, params.train.dim, {}, {} };
    for (auto n : anchors) {
        auto v = table.input(Token{ n, t });
        out.nodes.push_back(n);
        out.vectors.emplace_back(v.begin(), v.end());
    }
    return out;
}

struct Stwalk2Result {
    TrajectoryEmbedding trajectory;
    /// Trained on space walks over G_t.
    EmbeddingTable space;
    /// Trained on anchored walks over each node's time-only graph.
    EmbeddingTable time;
};

inline Stwalk2Result stwalk2_detailed(const TemporalGraphSet& g, TimeStep t, const StwalkParams& params) {
    params.validate();
    if (!g.valid_time(t) || t - params.tau < 1) {
        throw WindowError("window of size " + std::to_string(params.tau) + " ending at t=" + std::to_string(t) + " does not fit in [1, " + std::to_string(g.steps()) + "]");
    }
    auto anchors = detail::anchors_at(g, t, "stwalk2");

    auto space_corpus = build_space_corpus(g, t, params.space_walk_length, params.restarts,
                                           derive_seed(params.seed, "stwalk2/space-walks", t), params.threads);
    auto time_corpus = detail::anchored_corpus(anchors, t, params.time_walk_length, params.restarts,
                                               derive_seed(params.seed, "stwalk2/time-walks", t), params.threads,
                                               [&](NodeId n) { return create_time_only_graph(g, params.tau, n, t); });

    Stwalk2Result out;
    out.space = train(space_corpus, detail::seeded(params.train, derive_seed(params.seed, "stwalk2/space-train", t)));
    out.time = train(time_corpus, detail::seeded(params.train, derive_seed(params.seed, "stwalk2/time-train", t)));

    out.trajectory = TrajectoryEmbedding{ "stwalk2", t, params.train.dim, {}, {} };
    for (auto n : anchors) {
        Token tok{ n, t };
        out.trajectory.nodes.push_back(n);
        out.trajectory.vectors.push_back(combine(out.space.input(tok), out.time.input(tok)));
    }
    return out;
}

/// Separate space and time walks, each trained on its own, then combined.
inline TrajectoryEmbedding stwalk2(const TemporalGraphSet& g, TimeStep t, const StwalkParams& params) {
    return stwalk2_detailed(g, t, params).trajectory;
}

}

#endif
