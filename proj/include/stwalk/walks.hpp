#ifndef STWALK_WALKS_HPP
#define STWALK_WALKS_HPP

#include <algorithm>
#include <concepts>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <thread>
#include <vector>

#include "common.hpp"
#include "spacetime.hpp"
#include "temporal_graph.hpp"

namespace stwalk {

template<class Graph_>
concept WalkableGraph = requires(const Graph_& graph, VertexId v, Token tok) {
    { graph.vertex_count() } -> std::convertible_to<std::size_t>;
    { graph.token(v) } -> std::convertible_to<Token>;
    { graph.find(tok) } -> std::same_as<std::optional<VertexId>>;
    { graph.neighbors(v) } -> std::convertible_to<std::span<const VertexId>>;
};

/// G_t seen as a token graph; vertex ids are node ids.
class SnapshotGraph {
public:
    SnapshotGraph(const TemporalGraphSet& g, TimeStep t) : my_snapshot(&g.snapshot(t)), my_time(t) {}

    std::size_t vertex_count() const {
        return my_snapshot->universe_size();
    }

    Token token(VertexId v) const {
        return Token{ v, my_time };
    }

    std::optional<VertexId> find(const Token& tok) const {
        if (tok.time != my_time || tok.node >= my_snapshot->universe_size() || !my_snapshot->present(tok.node)) {
            return std::nullopt;
        }
        return tok.node;
    }

    std::span<const VertexId> neighbors(VertexId v) const {
        return my_snapshot->neighbors(v);
    }

private:
    const Snapshot* my_snapshot;
    TimeStep my_time;
};

using Walk = std::vector<Token>;

/// Walks treated as sentences, with per-token occurrence counts.
class WalkCorpus {
public:
    void add(Walk walk) {
        for (const auto& tok : walk) {
            ++my_counts[tok];
        }
        my_total += walk.size();
        my_walks.push_back(std::move(walk));
    }

    void append(const WalkCorpus& other) {
        for (const auto& w : other.my_walks) {
            add(w);
        }
    }

    const std::vector<Walk>& walks() const {
        return my_walks;
    }

    const std::map<Token, std::uint64_t>& vocabulary() const {
        return my_counts;
    }

    std::size_t size() const {
        return my_walks.size();
    }

    bool empty() const {
        return my_walks.empty();
    }

    std::uint64_t total_tokens() const {
        return my_total;
    }

    bool operator==(const WalkCorpus& other) const {
        return my_walks == other.my_walks;
    }

private:
    std::vector<Walk> my_walks;
    std::map<Token, std::uint64_t> my_counts;
    std::uint64_t my_total = 0;
};

/**
 * Uniform random walk of at most `length` tokens. Stops early at a token
 * without neighbors.
 */
template<WalkableGraph Graph_>
Walk random_walk(const Graph_& graph, const Token& start, std::size_t length, Rng& rng) {
    if (length < 1) {
        throw ValidationError("walk length must be at least 1");
    }
    auto found = graph.find(start);
    if (!found) {
        throw LookupError("start token (" + std::to_string(start.node) + ", " + std::to_string(start.time) + ") is not in the graph");
    }
    Walk walk;
    walk.reserve(length);
    VertexId cur = *found;
    walk.push_back(graph.token(cur));
    while (walk.size() < length) {
        std::span<const VertexId> nbrs = graph.neighbors(cur);
        if (nbrs.empty()) {
            break;
        }
        std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
        cur = nbrs[pick(rng)];
        walk.push_back(graph.token(cur));
    }
    return walk;
}

/**
 * Runs fn(i) for i in [0, n) on up to `threads` workers. Work is split into
 * contiguous blocks so each index is handled exactly once.
 */
template<class Function_>
void parallel_for(std::size_t n, std::size_t threads, Function_ fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t block = (n + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&, w]() {
            try {
                for (std::size_t i = w * block, end = std::min(n, (w + 1) * block); i < end; ++i) {
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : workers) {
        th.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

/// Stream seed for the r-th walk from `start`; independent of scheduling.
inline std::uint64_t walk_seed(std::uint64_t seed, const Token& start, std::size_t restart) {
    return derive_seed(seed, start.node, static_cast<std::uint32_t>(start.time), restart);
}

/**
 * `restarts` walks of at most `length` tokens from every node present at t,
 * confined to G_t. Walk order is node-major, then restart index.
 */
inline WalkCorpus build_space_corpus(const TemporalGraphSet& g, TimeStep t, std::size_t length, std::size_t restarts,
                                     std::uint64_t seed, std::size_t threads = 1)
{
    if (restarts < 1) {
        throw ValidationError("restarts must be at least 1");
    }
    if (length < 1) {
        throw ValidationError("walk length must be at least 1");
    }
    SnapshotGraph graph(g, t);
    auto starts = g.present_nodes(t);
    std::vector<Walk> slots(starts.size() * restarts);
    parallel_for(slots.size(), threads, [&](std::size_t i) {
        Token start{ starts[i / restarts], t };
        auto rng = make_rng(walk_seed(seed, start, i % restarts));
        slots[i] = random_walk(graph, start, length, rng);
    });
    WalkCorpus corpus;
    for (auto& w : slots) {
        corpus.add(std::move(w));
    }
    return corpus;
}

/// One walk per line, space-separated "node@t" tokens.
inline void write_corpus(std::ostream& out, const WalkCorpus& corpus, const TemporalGraphSet& g) {
    for (const auto& walk : corpus.walks()) {
        for (std::size_t i = 0; i < walk.size(); ++i) {
            if (i) {
                out << ' ';
            }
            out << g.token_name(walk[i]);
        }
        out << '\n';
    }
}

}

#endif
