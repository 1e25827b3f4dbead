#ifndef STWALK_BASELINES_HPP
#define STWALK_BASELINES_HPP

#include <cmath>
#include <string>
#include <vector>

#include "common.hpp"
#include "skipgram.hpp"
#include "stwalk.hpp"
#include "temporal_graph.hpp"
#include "walks.hpp"

namespace stwalk {

struct PageRankConfig {
    double damping = 0.85;
    std::size_t max_iterations = 200;
    /// On the L1 change between iterates.
    double tolerance = 1e-10;

    void validate() const {
        if (!(damping > 0 && damping < 1)) {
            throw ValidationError("damping must lie in (0, 1)");
        }
        if (!(tolerance > 0)) {
            throw ValidationError("tolerance must be positive");
        }
        if (max_iterations < 1) {
            throw ValidationError("max iterations must be at least 1");
        }
    }
};

/**
 * PageRank over the nodes present in the snapshot by power iteration.
 * Degree-0 nodes spread their rank uniformly. Absent nodes score 0.
 */
inline Vector pagerank(const Snapshot& snap, const PageRankConfig& cfg = {}, std::size_t* iterations = nullptr) {
    cfg.validate();
    auto nodes = snap.present_nodes();
    if (nodes.empty()) {
        throw ValidationError("PageRank needs a snapshot with at least one node");
    }
    const double n = static_cast<double>(nodes.size());
    Vector rank(snap.universe_size(), 0.0), next(snap.universe_size(), 0.0);
    for (auto v : nodes) {
        rank[v] = 1.0 / n;
    }

    std::size_t iter = 0;
    bool converged = false;
    while (iter < cfg.max_iterations) {
        ++iter;
        double dangling = 0;
        for (auto v : nodes) {
            if (snap.degree(v) == 0) {
                dangling += rank[v];
            }
        }
        const double base = (1.0 - cfg.damping) / n + cfg.damping * dangling / n;
        double change = 0;
        for (auto v : nodes) {
            double inflow = 0;
            for (auto u : snap.neighbors(v)) {
                inflow += rank[u] / static_cast<double>(snap.degree(u));
            }
            next[v] = base + cfg.damping * inflow;
            change += std::abs(next[v] - rank[v]);
        }
        std::swap(rank, next);
        if (change <= cfg.tolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        Log::warn("PageRank did not converge within " + std::to_string(cfg.max_iterations) + " iterations");
    }

    double total = 0;
    for (auto v : nodes) {
        total += rank[v];
    }
    for (auto v : nodes) {
        rank[v] /= total;
    }
    if (iterations) {
        *iterations = iter;
    }
    return rank;
}

namespace detail {

inline void check_baseline_window(const TemporalGraphSet& g, TimeStep t, int tau) {
    if (tau < 0 || !g.valid_time(t) || t - tau < 1) {
        throw WindowError("window of size " + std::to_string(tau) + " ending at t=" + std::to_string(t) + " does not fit in [1, " + std::to_string(g.steps()) + "]");
    }
}

}

/**
 * Per node present at t, its PageRank at t-tau, ..., t (0 where absent).
 */
inline TrajectoryEmbedding node_pagerank_trajectory(const TemporalGraphSet& g, TimeStep t, int tau, const PageRankConfig& cfg = {}) {
    detail::check_baseline_window(g, t, tau);
    const auto dim = static_cast<std::size_t>(tau) + 1;
    std::vector<Vector> per_step;
    for (TimeStep s = t - tau; s <= t; ++s) {
        const auto& snap = g.snapshot(s);
        if (snap.present_nodes().empty()) {
            per_step.emplace_back(g.node_count(), 0.0);
        } else {
            per_step.push_back(pagerank(snap, cfg));
        }
    }

    TrajectoryEmbedding out{ "node_pagerank", t, dim, {}, {} };
    for (auto n : detail::anchors_at(g, t, "node_pagerank")) {
        Vector v(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            v[i] = per_step[i][n];
        }
        out.nodes.push_back(n);
        out.vectors.push_back(std::move(v));
    }
    return out;
}

/**
 * DeepWalk on each snapshot of the window, then each node's input vectors
 * averaged over the snapshots where it is present. Snapshots are trained
 * independently, so their coordinates are not aligned.
 */
inline TrajectoryEmbedding avg_deepwalk_trajectory(const TemporalGraphSet& g, TimeStep t, int tau, const StwalkParams& params) {
    detail::check_baseline_window(g, t, tau);
    params.train.validate();
    const auto dim = params.train.dim;
    auto anchors = detail::anchors_at(g, t, "avg_deepwalk");
    std::vector<Vector> sums(anchors.size(), Vector(dim, 0.0));
    std::vector<std::size_t> seen(anchors.size(), 0);

    for (TimeStep s = t - tau; s <= t; ++s) {
        if (g.present_nodes(s).empty()) {
            continue;
        }
        auto corpus = build_space_corpus(g, s, params.walk_length, params.restarts,
                                         derive_seed(params.seed, "avg_deepwalk/walks", s), params.threads);
        auto table = train(corpus, detail::seeded(params.train, derive_seed(params.seed, "avg_deepwalk/train", s)));
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            auto idx = table.find(Token{ anchors[i], s });
            if (!idx) {
                continue;
            }
            auto v = table.input(*idx);
            for (std::size_t k = 0; k < dim; ++k) {
                sums[i][k] += v[k];
            }
            ++seen[i];
        }
    }

    TrajectoryEmbedding out{ "avg_deepwalk", t, dim, {}, {} };
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        // anchors are present at t, so seen[i] >= 1
        for (auto& x : sums[i]) {
            x /= static_cast<double>(seen[i]);
        }
        out.nodes.push_back(anchors[i]);
        out.vectors.push_back(std::move(sums[i]));
    }
    return out;
}

}

#endif
