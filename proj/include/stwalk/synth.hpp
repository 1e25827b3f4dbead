#ifndef STWALK_SYNTH_HPP
#define STWALK_SYNTH_HPP

#include <algorithm>
#include <filesystem>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "common.hpp"
#include "evaluation.hpp"
#include "temporal_graph.hpp"

namespace stwalk {

struct SynthConfig {
    std::size_t nodes = 300;
    TimeStep steps = 10;
    std::size_t communities = 2;
    double p_in = 0.10;
    double p_out = 0.01;
    double switcher_fraction = 0.5;
    std::uint64_t seed = 1;

    void validate() const {
        if (nodes < 2) {
            throw ValidationError("a planted graph needs at least 2 nodes");
        }
        if (steps < 2) {
            throw ValidationError("a planted graph needs at least 2 time steps");
        }
        if (communities < 2) {
            throw ValidationError("a planted graph needs at least 2 communities");
        }
        if (!(p_out >= 0 && p_out < p_in && p_in <= 1)) {
            throw ValidationError("edge probabilities must satisfy 0 <= p_out < p_in <= 1");
        }
        if (!(switcher_fraction >= 0 && switcher_fraction <= 1)) {
            throw ValidationError("switcher fraction must lie in [0, 1]");
        }
    }
};

struct PlantedNode {
    std::size_t home = 0;
    std::size_t target = 0;
    /// First step spent in `target`; 0 for nodes that never switch.
    TimeStep switch_step = 0;

    std::size_t community_at(TimeStep t) const {
        return switch_step != 0 && t >= switch_step ? target : home;
    }
};

struct PlantedDataset {
    TemporalGraphSet graph;
    NodeLabelTable labels;
    /// Over the full horizon, for every node in the graph's universe.
    std::map<NodeId, TrajectoryClass> ground_truth;
    /// Indexed by node id.
    std::vector<PlantedNode> planted;
};

inline std::string community_label(std::size_t c) {
    return "c" + std::to_string(c);
}

/**
 * Planted-partition temporal graph. Communities are equal-sized blocks;
 * a `switcher_fraction` of the nodes moves once, to a uniformly chosen other
 * community, at a step drawn uniformly from 2..steps. Each snapshot samples
 * every pair independently with p_in inside the current community and p_out
 * across. The node label at t is the current community.
 */
inline PlantedDataset generate_planted(const SynthConfig& cfg) {
    cfg.validate();
    auto rng = make_rng(cfg.seed);
    const std::size_t n = cfg.nodes;

    std::vector<PlantedNode> plan(n);
    for (std::size_t i = 0; i < n; ++i) {
        plan[i].home = i * cfg.communities / n;
        plan[i].target = plan[i].home;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto switchers = static_cast<std::size_t>(std::llround(cfg.switcher_fraction * static_cast<double>(n)));
    std::uniform_int_distribution<std::size_t> other(1, cfg.communities - 1);
    std::uniform_int_distribution<TimeStep> when(2, cfg.steps);
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(switchers));
    for (std::size_t s = 0; s < switchers; ++s) {
        auto& p = plan[order[s]];
        p.target = (p.home + other(rng)) % cfg.communities;
        p.switch_step = when(rng);
    }

    const auto width = std::to_string(n - 1).size();
    std::vector<std::string> names(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto num = std::to_string(i);
        names[i] = "n" + std::string(width - num.size(), '0') + num;
    }

    TemporalGraphBuilder builder;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (TimeStep t = 1; t <= cfg.steps; ++t) {
        builder.add_snapshot();
        for (std::size_t i = 0; i < n; ++i) {
            auto ci = plan[i].community_at(t);
            for (std::size_t j = i + 1; j < n; ++j) {
                double p = plan[j].community_at(t) == ci ? cfg.p_in : cfg.p_out;
                if (unit(rng) < p) {
                    builder.add_edge(names[i], names[j], t);
                }
            }
        }
    }

    PlantedDataset out;
    out.graph = builder.build();
    // Node ids are name-sorted, which with zero padding is generation order,
    // but a node without any edge drops out of the universe.
    out.planted.resize(out.graph.node_count());
    for (std::size_t i = 0; i < n; ++i) {
        auto id = out.graph.find(names[i]);
        if (!id) {
            continue;
        }
        const auto& p = plan[i];
        out.planted[*id] = p;
        for (TimeStep t = 1; t <= cfg.steps; ++t) {
            out.labels.set(*id, t, community_label(p.community_at(t)));
        }
        out.ground_truth.emplace(*id, p.switch_step != 0 ? TrajectoryClass::switching : TrajectoryClass::stable);
    }
    return out;
}

/**
 * Writes manifest.txt, one edge list per snapshot, labels.txt ("t node
 * label") and ground_truth.txt ("node class").
 */
inline void write_dataset(const PlantedDataset& data, const std::filesystem::path& dir) {
    save_snapshots(data.graph, dir);
    save_labels(data.labels, data.graph, dir / "labels.txt");
    auto out = detail::open_output(dir / "ground_truth.txt");
    for (const auto& [node, c] : data.ground_truth) {
        out << data.graph.name(node) << ' ' << class_name(c) << '\n';
    }
}

}

#endif
