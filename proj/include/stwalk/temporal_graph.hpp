#ifndef STWALK_TEMPORAL_GRAPH_HPP
#define STWALK_TEMPORAL_GRAPH_HPP

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "common.hpp"

namespace stwalk {

/**
 * One undirected, simple graph over the shared node universe. A node is
 * "present" at a snapshot when it was mentioned in that snapshot's input,
 * even if all of its edges were dropped.
 */
class Snapshot {
public:
    Snapshot() = default;

    Snapshot(std::vector<std::vector<NodeId>> adjacency, std::vector<char> present) :
        my_adjacency(std::move(adjacency)), my_present(std::move(present))
    {
        std::size_t total = 0;
        for (auto& adj : my_adjacency) {
            std::sort(adj.begin(), adj.end());
            total += adj.size();
        }
        my_edge_count = total / 2;
    }

    std::span<const NodeId> neighbors(NodeId node) const {
        return my_adjacency[node];
    }

    std::size_t degree(NodeId node) const {
        return my_adjacency[node].size();
    }

    bool present(NodeId node) const {
        return my_present[node] != 0;
    }

    std::size_t edge_count() const {
        return my_edge_count;
    }

    std::size_t universe_size() const {
        return my_adjacency.size();
    }

    std::vector<NodeId> present_nodes() const {
        std::vector<NodeId> out;
        for (NodeId n = 0; n < my_present.size(); ++n) {
            if (my_present[n]) {
                out.push_back(n);
            }
        }
        return out;
    }

    bool operator==(const Snapshot&) const = default;

private:
    std::vector<std::vector<NodeId>> my_adjacency;
    std::vector<char> my_present;
    std::size_t my_edge_count = 0;
};

/**
 * Ordered snapshots G_1..G_T over a node universe that is the union of all
 * snapshots. Node ids are assigned in lexicographic order of node names, so
 * neighbor lists sorted by id are also sorted by name.
 */
class TemporalGraphSet {
public:
    TemporalGraphSet() = default;

    TemporalGraphSet(std::vector<std::string> names, std::vector<Snapshot> snapshots, std::vector<std::string> time_labels) :
        my_names(std::move(names)), my_snapshots(std::move(snapshots)), my_time_labels(std::move(time_labels))
    {
        if (my_snapshots.empty()) {
            throw ValidationError("a temporal graph needs at least one snapshot");
        }
        if (my_time_labels.size() != my_snapshots.size()) {
            throw ValidationError("time label count does not match snapshot count");
        }
        for (NodeId i = 0; i < my_names.size(); ++i) {
            my_index.emplace(my_names[i], i);
        }
        for (std::size_t t = 0; t < my_time_labels.size(); ++t) {
            my_time_index.emplace(my_time_labels[t], static_cast<TimeStep>(t + 1));
        }
    }

    std::size_t node_count() const {
        return my_names.size();
    }

    TimeStep steps() const {
        return static_cast<TimeStep>(my_snapshots.size());
    }

    const std::string& name(NodeId node) const {
        check_node(node);
        return my_names[node];
    }

    const std::vector<std::string>& names() const {
        return my_names;
    }

    std::optional<NodeId> find(std::string_view name) const {
        auto it = my_index.find(std::string(name));
        if (it == my_index.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    NodeId id(std::string_view name) const {
        auto found = find(name);
        if (!found) {
            throw LookupError("unknown node '" + std::string(name) + "'");
        }
        return *found;
    }

    const Snapshot& snapshot(TimeStep t) const {
        check_time(t);
        return my_snapshots[static_cast<std::size_t>(t - 1)];
    }

    std::span<const NodeId> neighbors(NodeId node, TimeStep t) const {
        check_node(node);
        return snapshot(t).neighbors(node);
    }

    std::vector<std::string> neighbors(std::string_view node, TimeStep t) const {
        std::vector<std::string> out;
        for (auto n : neighbors(id(node), t)) {
            out.push_back(my_names[n]);
        }
        return out;
    }

    bool present(NodeId node, TimeStep t) const {
        check_node(node);
        return snapshot(t).present(node);
    }

    std::vector<NodeId> present_nodes(TimeStep t) const {
        return snapshot(t).present_nodes();
    }

    const std::string& time_label(TimeStep t) const {
        check_time(t);
        return my_time_labels[static_cast<std::size_t>(t - 1)];
    }

    std::optional<TimeStep> time_of(std::string_view label) const {
        auto it = my_time_index.find(std::string(label));
        if (it == my_time_index.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    bool valid_time(TimeStep t) const {
        return t >= 1 && t <= steps();
    }

    std::string token_name(const Token& tok) const {
        return name(tok.node) + "@" + std::to_string(tok.time);
    }

    /// Inverse of token_name(); the node part may itself contain '@'.
    Token parse_token(std::string_view text) const {
        auto at = text.rfind('@');
        if (at == std::string_view::npos) {
            throw ParseError("token '" + std::string(text) + "' is not of the form node@t");
        }
        TimeStep t = 0;
        auto tail = text.substr(at + 1);
        auto res = std::from_chars(tail.data(), tail.data() + tail.size(), t);
        if (res.ec != std::errc() || res.ptr != tail.data() + tail.size()) {
            throw ParseError("token '" + std::string(text) + "' has a malformed time step");
        }
        check_time(t);
        return Token{ id(text.substr(0, at)), t };
    }

    bool operator==(const TemporalGraphSet& other) const {
        return my_names == other.my_names && my_snapshots == other.my_snapshots && my_time_labels == other.my_time_labels;
    }

private:
    void check_node(NodeId node) const {
        if (node >= my_names.size()) {
            throw LookupError("node id " + std::to_string(node) + " is outside the node universe");
        }
    }

    void check_time(TimeStep t) const {
        if (!valid_time(t)) {
            throw LookupError("time step " + std::to_string(t) + " is outside [1, " + std::to_string(steps()) + "]");
        }
    }

    std::vector<std::string> my_names;
    std::unordered_map<std::string, NodeId> my_index;
    std::vector<Snapshot> my_snapshots;
    std::vector<std::string> my_time_labels;
    std::unordered_map<std::string, TimeStep> my_time_index;
};

enum class EdgeStatus { added, self_loop, duplicate };

/**
 * Accumulates snapshots by node name. Self-loops and repeated edges are
 * dropped (the endpoints still count as present).
 */
class TemporalGraphBuilder {
public:
    TimeStep add_snapshot(std::string label = {}) {
        my_edges.emplace_back();
        my_present.emplace_back();
        if (label.empty()) {
            label = std::to_string(my_edges.size());
        }
        my_labels.push_back(std::move(label));
        return static_cast<TimeStep>(my_edges.size());
    }

    TimeStep steps() const {
        return static_cast<TimeStep>(my_edges.size());
    }

    void add_node(std::string_view name, TimeStep t) {
        auto& pres = my_present.at(index_of(t));
        pres.insert(intern(name));
    }

    EdgeStatus add_edge(std::string_view u, std::string_view v, TimeStep t) {
        auto idx = index_of(t);
        auto a = intern(u);
        auto b = intern(v);
        my_present[idx].insert(a);
        my_present[idx].insert(b);
        if (a == b) {
            return EdgeStatus::self_loop;
        }
        if (a > b) {
            std::swap(a, b);
        }
        return my_edges[idx].emplace(a, b).second ? EdgeStatus::added : EdgeStatus::duplicate;
    }

    TemporalGraphSet build() const {
        std::vector<std::size_t> order(my_names.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return my_names[l] < my_names[r]; });
        std::vector<NodeId> remap(my_names.size());
        std::vector<std::string> names;
        names.reserve(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            remap[order[i]] = static_cast<NodeId>(i);
            names.push_back(my_names[order[i]]);
        }

        std::vector<Snapshot> snaps;
        for (std::size_t s = 0; s < my_edges.size(); ++s) {
            std::vector<std::vector<NodeId>> adj(names.size());
            for (const auto& [a, b] : my_edges[s]) {
                adj[remap[a]].push_back(remap[b]);
                adj[remap[b]].push_back(remap[a]);
            }
            std::vector<char> present(names.size(), 0);
            for (auto n : my_present[s]) {
                present[remap[n]] = 1;
            }
            snaps.emplace_back(std::move(adj), std::move(present));
        }
        return TemporalGraphSet(std::move(names), std::move(snaps), my_labels);
    }

private:
    std::size_t index_of(TimeStep t) const {
        if (t < 1 || t > steps()) {
            throw LookupError("time step " + std::to_string(t) + " has not been added to the builder");
        }
        return static_cast<std::size_t>(t - 1);
    }

    std::size_t intern(std::string_view name) {
        auto it = my_ids.find(std::string(name));
        if (it != my_ids.end()) {
            return it->second;
        }
        auto id = my_names.size();
        my_names.emplace_back(name);
        my_ids.emplace(my_names.back(), id);
        return id;
    }

    std::vector<std::string> my_names;
    std::unordered_map<std::string, std::size_t> my_ids;
    std::vector<std::set<std::pair<std::size_t, std::size_t>>> my_edges;
    std::vector<std::set<std::size_t>> my_present;
    std::vector<std::string> my_labels;
};

struct LoadReport {
    std::size_t self_loops = 0;
    std::size_t duplicates = 0;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) {
        out.push_back(std::move(tok));
    }
    return out;
}

inline bool skip_line(const std::string& line) {
    auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#';
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read '" + path.string() + "'");
    }
    return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    return out;
}

inline std::string where(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

}

/**
 * Reads one edge-list file per snapshot, in the given order. Each
 * non-comment line holds two whitespace-separated node identifiers.
 */
inline TemporalGraphSet load_snapshots(const std::vector<std::filesystem::path>& paths,
                                       const std::vector<std::string>& time_labels = {},
                                       LoadReport* report = nullptr)
{
    if (paths.empty()) {
        throw ValidationError("no snapshot files given");
    }
    if (!time_labels.empty() && time_labels.size() != paths.size()) {
        throw ValidationError("time label count does not match snapshot count");
    }

    TemporalGraphBuilder builder;
    LoadReport total;
    for (std::size_t s = 0; s < paths.size(); ++s) {
        auto t = builder.add_snapshot(time_labels.empty() ? std::string{} : time_labels[s]);
        auto in = detail::open_input(paths[s]);
        LoadReport local;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (detail::skip_line(line)) {
                continue;
            }
            auto fields = detail::split_ws(line);
            if (fields.size() != 2) {
                throw ParseError(detail::where(paths[s], lineno) + ": expected two node identifiers, found " + std::to_string(fields.size()));
            }
            switch (builder.add_edge(fields[0], fields[1], t)) {
            case EdgeStatus::self_loop:
                ++local.self_loops;
                break;
            case EdgeStatus::duplicate:
                ++local.duplicates;
                break;
            case EdgeStatus::added:
                break;
            }
        }
        if (local.self_loops) {
            Log::warn(paths[s].string() + ": dropped " + std::to_string(local.self_loops) + " self-loop(s)");
        }
        if (local.duplicates) {
            Log::warn(paths[s].string() + ": dropped " + std::to_string(local.duplicates) + " duplicate edge(s)");
        }
        total.self_loops += local.self_loops;
        total.duplicates += local.duplicates;
    }
    if (report) {
        *report = total;
    }
    return builder.build();
}

/**
 * A manifest lists one snapshot path per line in time order, optionally
 * followed by a time label ("snap_01.txt 2002-03"). Relative paths resolve
 * against the manifest's directory.
 */
inline TemporalGraphSet load_manifest(const std::filesystem::path& manifest, LoadReport* report = nullptr) {
    auto in = detail::open_input(manifest);
    std::vector<std::filesystem::path> paths;
    std::vector<std::string> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::skip_line(line)) {
            continue;
        }
        auto fields = detail::split_ws(line);
        if (fields.size() > 2) {
            throw ParseError(detail::where(manifest, lineno) + ": expected 'path [time-label]'");
        }
        std::filesystem::path p(fields[0]);
        if (p.is_relative()) {
            p = manifest.parent_path() / p;
        }
        paths.push_back(std::move(p));
        labels.push_back(fields.size() == 2 ? fields[1] : std::to_string(paths.size()));
    }
    return load_snapshots(paths, labels, report);
}

/**
 * Writes one edge-list file per snapshot plus "manifest.txt" into dir.
 * Present nodes without edges cannot be expressed in an edge list and are
 * lost on reload.
 */
inline std::filesystem::path save_snapshots(const TemporalGraphSet& g, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto manifest_path = dir / "manifest.txt";
    auto manifest = detail::open_output(manifest_path);
    const int width = static_cast<int>(std::to_string(g.steps()).size());
    for (TimeStep t = 1; t <= g.steps(); ++t) {
        std::string num = std::to_string(t);
        num.insert(0, static_cast<std::size_t>(width) - num.size(), '0');
        std::string fname = "snapshot_" + num + ".txt";
        auto out = detail::open_output(dir / fname);
        const auto& snap = g.snapshot(t);
        for (NodeId u = 0; u < g.node_count(); ++u) {
            for (auto v : snap.neighbors(u)) {
                if (u < v) {
                    out << g.name(u) << ' ' << g.name(v) << '\n';
                }
            }
        }
        manifest << fname << ' ' << g.time_label(t) << '\n';
    }
    return manifest_path;
}

/// Categorical node labels per (node, time step).
class NodeLabelTable {
public:
    /// Returns true if an existing, different label was overwritten.
    bool set(NodeId node, TimeStep t, std::string label) {
        auto [it, inserted] = my_labels.try_emplace(Token{ node, t }, label);
        bool conflict = false;
        if (!inserted) {
            conflict = it->second != label;
            it->second = label;
        }
        my_label_set.insert(std::move(label));
        return conflict;
    }

    const std::string* get(NodeId node, TimeStep t) const {
        auto it = my_labels.find(Token{ node, t });
        return it == my_labels.end() ? nullptr : &it->second;
    }

    const std::map<Token, std::string>& entries() const {
        return my_labels;
    }

    const std::set<std::string>& label_set() const {
        return my_label_set;
    }

    bool empty() const {
        return my_labels.empty();
    }

    std::size_t size() const {
        return my_labels.size();
    }

    bool operator==(const NodeLabelTable& other) const {
        return my_labels == other.my_labels;
    }

private:
    std::map<Token, std::string> my_labels;
    std::set<std::string> my_label_set;
};

/**
 * Reads "t node label" lines. Conflicting duplicates keep the last label and
 * emit a warning.
 */
inline NodeLabelTable load_labels(const std::filesystem::path& path, const TemporalGraphSet& g) {
    auto in = detail::open_input(path);
    NodeLabelTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::skip_line(line)) {
            continue;
        }
        auto fields = detail::split_ws(line);
        if (fields.size() != 3) {
            throw ParseError(detail::where(path, lineno) + ": expected 't node label'");
        }
        TimeStep t = 0;
        auto res = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), t);
        if (res.ec != std::errc() || res.ptr != fields[0].data() + fields[0].size()) {
            throw ParseError(detail::where(path, lineno) + ": malformed time step '" + fields[0] + "'");
        }
        if (!g.valid_time(t)) {
            throw ParseError(detail::where(path, lineno) + ": time step " + fields[0] + " outside [1, " + std::to_string(g.steps()) + "]");
        }
        auto node = g.find(fields[1]);
        if (!node) {
            throw ParseError(detail::where(path, lineno) + ": unknown node '" + fields[1] + "'");
        }
        if (table.set(*node, t, fields[2])) {
            Log::warn(detail::where(path, lineno) + ": conflicting label for (" + fields[1] + ", " + fields[0] + "), keeping '" + fields[2] + "'");
        }
    }
    return table;
}

inline void save_labels(const NodeLabelTable& labels, const TemporalGraphSet& g, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    // time-major so the file reads chronologically
    std::vector<std::pair<Token, const std::string*>> rows;
    for (const auto& [tok, label] : labels.entries()) {
        rows.emplace_back(tok, &label);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& l, const auto& r) { return l.first.time < r.first.time; });
    for (const auto& [tok, label] : rows) {
        out << tok.time << ' ' << g.name(tok.node) << ' ' << *label << '\n';
    }
}

}

#endif
