#ifndef STWALK_PIPELINE_HPP
#define STWALK_PIPELINE_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "baselines.hpp"
#include "embedding_io.hpp"
#include "evaluation.hpp"
#include "stwalk.hpp"

namespace stwalk {

enum class Method { stwalk1, stwalk2, node_pagerank, avg_deepwalk };

inline std::optional<Method> parse_method(std::string_view name) {
    if (name == "stwalk1") {
        return Method::stwalk1;
    }
    if (name == "stwalk2") {
        return Method::stwalk2;
    }
    if (name == "pagerank" || name == "node_pagerank") {
        return Method::node_pagerank;
    }
    if (name == "avg-deepwalk" || name == "avg_deepwalk") {
        return Method::avg_deepwalk;
    }
    return std::nullopt;
}

inline std::string method_name(Method m) {
    switch (m) {
    case Method::stwalk1:
        return "stwalk1";
    case Method::stwalk2:
        return "stwalk2";
    case Method::node_pagerank:
        return "node_pagerank";
    case Method::avg_deepwalk:
        return "avg_deepwalk";
    }
    return "unknown";
}

/// Trajectory vectors for the window of size params.tau ending at t.
inline TrajectoryEmbedding embed(const TemporalGraphSet& g, TimeStep t, Method method, const StwalkParams& params,
                                 const PageRankConfig& pr = {})
{
    switch (method) {
    case Method::stwalk1:
        return stwalk1(g, t, params);
    case Method::stwalk2:
        return stwalk2(g, t, params);
    case Method::node_pagerank:
        return node_pagerank_trajectory(g, t, params.tau, pr);
    case Method::avg_deepwalk:
        return avg_deepwalk_trajectory(g, t, params.tau, params);
    }
    throw ValidationError("unknown method");
}

/// Window ends tau+1, ..., steps.
inline std::vector<TimeStep> window_ends(const TemporalGraphSet& g, int tau) {
    std::vector<TimeStep> out;
    for (TimeStep t = tau + 1; t <= g.steps(); ++t) {
        out.push_back(t);
    }
    return out;
}

/// Distinct node labels over [t - tau, t] for nodes labeled at two or more steps.
inline std::map<NodeId, std::set<std::string>> window_label_sets(const NodeLabelTable& labels, TimeStep t, int tau) {
    if (tau < 0 || t - tau < 1) {
        throw WindowError("window of size " + std::to_string(tau) + " ending at t=" + std::to_string(t) + " starts before the first snapshot");
    }
    std::map<NodeId, std::set<std::string>> sets;
    std::map<NodeId, std::size_t> steps;
    for (const auto& [tok, label] : labels.entries()) {
        if (tok.time >= t - tau && tok.time <= t) {
            sets[tok.node].insert(label);
            ++steps[tok.node];
        }
    }
    for (const auto& [node, count] : steps) {
        if (count < 2) {
            sets.erase(node);
        }
    }
    return sets;
}

/// A stored embedding file resolved against a graph: "node@t" keys become tokens.
struct ResolvedEmbeddings {
    std::vector<Token> tokens;
    std::vector<Vector> vectors;
};

inline ResolvedEmbeddings resolve_tokens(const NamedEmbeddings& emb, const TemporalGraphSet& g) {
    ResolvedEmbeddings out;
    for (std::size_t i = 0; i < emb.size(); ++i) {
        out.tokens.push_back(g.parse_token(emb.tokens[i]));
        out.vectors.push_back(emb.vectors[i]);
    }
    return out;
}

/// Every vector whose node has a trajectory label for the window ending at its time.
inline TrajectoryDataset labeled_dataset(const ResolvedEmbeddings& emb, const NodeLabelTable& labels, int tau) {
    std::map<TimeStep, std::map<NodeId, TrajectoryClass>> by_time;
    TrajectoryDataset out;
    for (std::size_t i = 0; i < emb.tokens.size(); ++i) {
        const auto& tok = emb.tokens[i];
        if (tok.time - tau < 1) {
            continue;
        }
        auto [it, inserted] = by_time.try_emplace(tok.time);
        if (inserted) {
            it->second = derive_trajectory_labels(labels, tok.time, tau);
        }
        auto found = it->second.find(tok.node);
        if (found != it->second.end()) {
            out.add(TrajectoryExample{ tok.node, tok.time, emb.vectors[i], class_name(found->second) });
        }
    }
    return out;
}

struct ArithmeticSets {
    std::vector<Vector> pure_a;
    std::vector<Vector> pure_b;
    std::vector<Vector> mixed;
    std::vector<std::size_t> pure_a_index;
    std::vector<std::size_t> pure_b_index;
    std::vector<std::size_t> mixed_index;

    ArithmeticCentroids centroids() const {
        return ArithmeticCentroids{ centroid(pure_a), centroid(pure_b), centroid(mixed) };
    }
};

/**
 * Groups vectors by their window's node labels: only `label_a` is pure A,
 * only `label_b` is pure B, and a window that opens with `label_a`, closes
 * with `label_b` and holds nothing else is mixed. Other nodes are ignored.
 */
inline ArithmeticSets arithmetic_sets(const ResolvedEmbeddings& emb, const NodeLabelTable& labels, int tau,
                                      const std::string& label_a, const std::string& label_b)
{
    struct Window {
        std::set<std::string> seen;
        std::string first;
        std::string last;
        std::size_t steps = 0;
    };
    auto profile = [&](NodeId node, TimeStep t) {
        Window w;
        for (TimeStep s = t - tau; s <= t; ++s) {
            if (auto l = labels.get(node, s)) {
                if (w.steps == 0) {
                    w.first = *l;
                }
                w.last = *l;
                w.seen.insert(*l);
                ++w.steps;
            }
        }
        return w;
    };

    const std::set<std::string> only_a{ label_a }, only_b{ label_b }, both{ label_a, label_b };
    ArithmeticSets out;
    for (std::size_t i = 0; i < emb.tokens.size(); ++i) {
        const auto& tok = emb.tokens[i];
        if (tok.time - tau < 1) {
            continue;
        }
        auto w = profile(tok.node, tok.time);
        if (w.steps < 2) {
            continue;
        }
        if (w.seen == only_a) {
            out.pure_a.push_back(emb.vectors[i]);
            out.pure_a_index.push_back(i);
        } else if (w.seen == only_b) {
            out.pure_b.push_back(emb.vectors[i]);
            out.pure_b_index.push_back(i);
        } else if (w.seen == both && w.first == label_a && w.last == label_b) {
            out.mixed.push_back(emb.vectors[i]);
            out.mixed_index.push_back(i);
        }
    }
    return out;
}

struct ClassifierSettings {
    double train_ratio = 0.7;
    std::size_t epochs = 50;
    double learning_rate = 0.05;
};

/// Held-out accuracy per classifier seed.
inline std::vector<double> classification_accuracies(const TrajectoryDataset& data, const std::vector<std::uint64_t>& seeds,
                                                     const ClassifierSettings& settings = {})
{
    std::vector<double> out;
    for (auto s : seeds) {
        out.push_back(train_classifier(data, settings.train_ratio, s, settings.epochs, settings.learning_rate).accuracy);
    }
    return out;
}

}

#endif
