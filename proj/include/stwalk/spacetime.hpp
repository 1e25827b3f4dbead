#ifndef STWALK_SPACETIME_HPP
#define STWALK_SPACETIME_HPP

#include <algorithm>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "common.hpp"
#include "temporal_graph.hpp"

namespace stwalk {

using VertexId = std::uint32_t;

enum class EdgeKind : char { spatial = 'S', temporal = 'T' };

struct TokenEdge {
    VertexId a;
    VertexId b;
    EdgeKind kind;
};

/**
 * Undirected simple graph whose vertices are tokens. Each edge is tagged as
 * spatial (same time step) or temporal (same node, adjacent time steps).
 */
class TokenGraph {
public:
    TokenGraph() = default;

    explicit TokenGraph(Token anchor) : my_anchor(anchor) {
        add_token(anchor);
    }

    VertexId add_token(Token tok) {
        auto [it, inserted] = my_index.try_emplace(tok, static_cast<VertexId>(my_tokens.size()));
        if (inserted) {
            my_tokens.push_back(tok);
            my_adjacency.emplace_back();
        }
        return it->second;
    }

    /// Returns false if the edge already exists or is a self-loop.
    bool add_edge(Token a, Token b, EdgeKind kind) {
        auto va = add_token(a);
        auto vb = add_token(b);
        if (va == vb) {
            return false;
        }
        auto key = std::minmax(va, vb);
        if (!my_edge_set.insert(key).second) {
            return false;
        }
        my_adjacency[va].push_back(vb);
        my_adjacency[vb].push_back(va);
        my_edges.push_back(TokenEdge{ va, vb, kind });
        return true;
    }

    std::size_t vertex_count() const {
        return my_tokens.size();
    }

    const Token& token(VertexId v) const {
        return my_tokens[v];
    }

    const std::vector<Token>& tokens() const {
        return my_tokens;
    }

    std::optional<VertexId> find(const Token& tok) const {
        auto it = my_index.find(tok);
        if (it == my_index.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    bool contains(const Token& tok) const {
        return my_index.count(tok) > 0;
    }

    std::span<const VertexId> neighbors(VertexId v) const {
        return my_adjacency[v];
    }

    const std::vector<TokenEdge>& edges() const {
        return my_edges;
    }

    std::size_t edge_count(EdgeKind kind) const {
        return static_cast<std::size_t>(std::count_if(my_edges.begin(), my_edges.end(), [&](const TokenEdge& e) { return e.kind == kind; }));
    }

    const Token& anchor() const {
        return my_anchor;
    }

private:
    Token my_anchor{};
    std::vector<Token> my_tokens;
    std::unordered_map<Token, VertexId, TokenHash> my_index;
    std::vector<std::vector<VertexId>> my_adjacency;
    std::vector<TokenEdge> my_edges;
    std::set<std::pair<VertexId, VertexId>> my_edge_set;
};

using SpaceTimeGraph = TokenGraph;

namespace detail {

inline void check_window(const TemporalGraphSet& g, int tau, NodeId start, TimeStep t) {
    if (tau < 0) {
        throw WindowError("window size must be nonnegative, got " + std::to_string(tau));
    }
    if (!g.valid_time(t)) {
        throw WindowError("time step " + std::to_string(t) + " is outside [1, " + std::to_string(g.steps()) + "]");
    }
    if (t - tau < 1) {
        throw WindowError("window of size " + std::to_string(tau) + " ending at t=" + std::to_string(t) + " starts before the first snapshot");
    }
    if (start >= g.node_count()) {
        throw LookupError("start node id " + std::to_string(start) + " is outside the node universe");
    }
}

/**
 * Adds the ego subgraph of `node` at step s (the node, its direct neighbors
 * and every edge among them) as spatial edges.
 */
inline void add_ego_subgraph(TokenGraph& out, const Snapshot& snap, NodeId node, TimeStep s) {
    Token center{ node, s };
    out.add_token(center);
    auto nbrs = snap.neighbors(node);
    for (auto v : nbrs) {
        out.add_edge(center, Token{ v, s }, EdgeKind::spatial);
    }
    for (auto v : nbrs) {
        for (auto w : snap.neighbors(v)) {
            if (w > v && std::binary_search(nbrs.begin(), nbrs.end(), w)) {
                out.add_edge(Token{ v, s }, Token{ w, s }, EdgeKind::spatial);
            }
        }
    }
}

inline void add_past(TokenGraph& out, const TemporalGraphSet& g, int tau, NodeId start, TimeStep t) {
    for (int i = 1; i <= tau; ++i) {
        TimeStep s = t - i;
        add_ego_subgraph(out, g.snapshot(s), start, s);
        out.add_edge(Token{ start, s + 1 }, Token{ start, s }, EdgeKind::temporal);
    }
}

}

/**
 * All of G_t lifted to time-t tokens, plus, for each of the `tau` previous
 * steps, the start node's ego subgraph at that step joined to the next-later
 * copy of the start node by a temporal edge.
 */
inline SpaceTimeGraph create_space_time_graph(const TemporalGraphSet& g, int tau, NodeId start, TimeStep t) {
    detail::check_window(g, tau, start, t);
    SpaceTimeGraph out(Token{ start, t });
    const auto& current = g.snapshot(t);
    for (NodeId n = 0; n < current.universe_size(); ++n) {
        if (current.present(n)) {
            out.add_token(Token{ n, t });
        }
    }
    for (NodeId u = 0; u < current.universe_size(); ++u) {
        for (auto v : current.neighbors(u)) {
            if (u < v) {
                out.add_edge(Token{ u, t }, Token{ v, t }, EdgeKind::spatial);
            }
        }
    }
    detail::add_past(out, g, tau, start, t);
    return out;
}

inline SpaceTimeGraph create_space_time_graph(const TemporalGraphSet& g, int tau, std::string_view start, TimeStep t) {
    return create_space_time_graph(g, tau, g.id(start), t);
}

/**
 * The space-time graph with the time-t neighborhood removed: the anchor is
 * linked only to its past copy at t-1.
 */
inline SpaceTimeGraph create_time_only_graph(const TemporalGraphSet& g, int tau, NodeId start, TimeStep t) {
    detail::check_window(g, tau, start, t);
    if (tau < 1) {
        throw WindowError("the time-only graph needs a window of at least 1");
    }
    SpaceTimeGraph out(Token{ start, t });
    detail::add_past(out, g, tau, start, t);
    return out;
}

inline SpaceTimeGraph create_time_only_graph(const TemporalGraphSet& g, int tau, std::string_view start, TimeStep t) {
    return create_time_only_graph(g, tau, g.id(start), t);
}

/// Debug dump: "u@t v@s S|T" per edge.
inline void write_token_graph(std::ostream& out, const TokenGraph& graph, const TemporalGraphSet& g) {
    for (const auto& e : graph.edges()) {
        out << g.token_name(graph.token(e.a)) << ' ' << g.token_name(graph.token(e.b)) << ' ' << static_cast<char>(e.kind) << '\n';
    }
}

}

#endif
