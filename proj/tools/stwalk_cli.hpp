#ifndef STWALK_TOOLS_CLI_HPP
#define STWALK_TOOLS_CLI_HPP

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stwalk/all.hpp"

namespace stwalk::cli {

namespace fs = std::filesystem;

/// Everything needed to reproduce one run.
struct RunManifest {
    std::string subcommand;
    nlohmann::json parameters = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> outputs;

    nlohmann::json to_json() const {
        return nlohmann::json{
            { "subcommand", subcommand },
            { "parameters", parameters },
            { "seed", seed },
            { "inputs", inputs },
            { "outputs", outputs },
        };
    }

    void write(const fs::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write '" + path.string() + "'");
        }
        out << to_json().dump(2) << '\n';
    }
};

inline std::optional<RunManifest> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        return std::nullopt;
    }
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        return std::nullopt;
    }
    RunManifest m;
    m.subcommand = j.value("subcommand", "");
    m.parameters = j.value("parameters", nlohmann::json::object());
    m.seed = j.value("seed", std::uint64_t{ 0 });
    return m;
}

inline fs::path sidecar_path(const fs::path& file) {
    return fs::path(file.string() + ".manifest.json");
}

struct GenerateOptions {
    std::string out;
    SynthConfig synth;
};

struct EmbedOptions {
    std::string graph;
    std::string method;
    std::string out;
    std::size_t dim = 64;
    int tau = 5;
    std::size_t walk_len = 30;
    std::optional<std::size_t> space_walk_len;
    std::optional<std::size_t> time_walk_len;
    std::size_t restarts = 40;
    std::size_t vocab_window = 5;
    std::size_t negatives = 5;
    std::size_t epochs = 1;
    double lr = 0.025;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::vector<int> times;
    double damping = 0.85;
};

struct ClassifyOptions {
    std::string embeddings;
    std::string graph;
    std::string labels;
    std::string out;
    int tau = 5;
    std::size_t repeats = 5;
    double split = 0.7;
    std::size_t epochs = 50;
    double lr = 0.05;
    std::uint64_t seed = 1;
};

struct ChangepointOptions {
    std::string graph;
    std::string labels;
    std::string out;
    std::string level = "node";
    int tau = 5;
    double unit = 1.0;
};

struct ArithOptions {
    std::string embeddings;
    std::string graph;
    std::string labels;
    std::string out;
    int tau = 5;
    std::string class_a = "c0";
    std::string class_b = "c1";
    std::size_t samples = 0;
    std::uint64_t seed = 1;
};

struct PcaOptions {
    std::string embeddings;
    std::string graph;
    std::string labels;
    std::string out;
    int tau = 5;
    std::size_t components = 2;
};

namespace detail {

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << text;
}

inline std::string fixed(double x, int digits = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << x;
    return s.str();
}

inline int run_generate(const GenerateOptions& opt, std::ostream& out) {
    auto data = generate_planted(opt.synth);
    write_dataset(data, opt.out);
    RunManifest m;
    m.subcommand = "generate";
    m.seed = opt.synth.seed;
    m.parameters = {
        { "nodes", opt.synth.nodes },
        { "steps", opt.synth.steps },
        { "communities", opt.synth.communities },
        { "p_in", opt.synth.p_in },
        { "p_out", opt.synth.p_out },
        { "switcher_fraction", opt.synth.switcher_fraction },
    };
    // Relative to the dataset directory, so the directory is self-describing
    // and identical wherever it is written.
    m.outputs = { { "manifest", "manifest.txt" }, { "labels", "labels.txt" }, { "ground_truth", "ground_truth.txt" } };
    m.write(fs::path(opt.out) / "run_manifest.json");
    out << "wrote " << data.graph.node_count() << " nodes x " << data.graph.steps() << " snapshots to " << opt.out << '\n';
    return 0;
}

inline int run_embed(const EmbedOptions& opt, std::ostream& out) {
    auto method = parse_method(opt.method);
    if (!method) {
        throw ValidationError("unknown method '" + opt.method + "'");
    }
    auto g = load_manifest(opt.graph);

    StwalkParams params;
    params.tau = opt.tau;
    params.walk_length = opt.walk_len;
    params.space_walk_length = opt.space_walk_len.value_or(opt.walk_len);
    params.time_walk_length = opt.time_walk_len.value_or(opt.walk_len);
    params.restarts = opt.restarts;
    params.train.dim = opt.dim;
    params.train.window = opt.vocab_window;
    params.train.negatives = opt.negatives;
    params.train.epochs = opt.epochs;
    params.train.learning_rate = opt.lr;
    params.train.threads = opt.threads;
    params.seed = opt.seed;
    params.threads = opt.threads;
    PageRankConfig pr;
    pr.damping = opt.damping;

    std::vector<TimeStep> times(opt.times.begin(), opt.times.end());
    if (times.empty()) {
        times = window_ends(g, opt.tau);
    }
    if (times.empty()) {
        throw WindowError("no window of size " + std::to_string(opt.tau) + " fits in " + std::to_string(g.steps()) + " snapshots");
    }

    NamedEmbeddings all;
    all.dim = *method == Method::node_pagerank ? static_cast<std::size_t>(opt.tau) + 1 : opt.dim;
    for (auto t : times) {
        auto emb = embed(g, t, *method, params, pr).named(g);
        for (std::size_t i = 0; i < emb.size(); ++i) {
            all.add(std::move(emb.tokens[i]), std::move(emb.vectors[i]));
        }
    }
    save_embeddings(fs::path(opt.out), all);

    RunManifest m;
    m.subcommand = "embed";
    m.seed = opt.seed;
    nlohmann::json windows = nlohmann::json::array();
    for (auto t : times) {
        windows.push_back(t);
    }
    m.parameters = {
        { "method", method_name(*method) },
        { "dim", all.dim },
        { "tau", opt.tau },
        { "walk_len", params.walk_length },
        { "space_walk_len", params.space_walk_length },
        { "time_walk_len", params.time_walk_length },
        { "restarts", opt.restarts },
        { "vocab_window", opt.vocab_window },
        { "negatives", opt.negatives },
        { "epochs", opt.epochs },
        { "lr", opt.lr },
        { "threads", opt.threads },
        { "damping", opt.damping },
        { "window_ends", windows },
    };
    m.inputs = { { "graph", opt.graph } };
    m.outputs = { { "embeddings", opt.out } };
    m.write(sidecar_path(opt.out));
    out << "wrote " << all.size() << " " << method_name(*method) << " vectors of dimension " << all.dim << " to " << opt.out << '\n';
    return 0;
}

inline int run_classify(const ClassifyOptions& opt, std::ostream& out) {
    auto g = load_manifest(opt.graph);
    auto labels = load_labels(opt.labels, g);
    auto emb = resolve_tokens(load_embeddings(fs::path(opt.embeddings)), g);
    auto data = labeled_dataset(emb, labels, opt.tau);
    if (opt.repeats < 1) {
        throw ValidationError("--repeats must be at least 1");
    }

    std::map<std::string, std::size_t> per_class;
    for (const auto& e : data.entries) {
        ++per_class[e.label];
    }

    std::ostringstream report;
    auto sidecar = read_manifest(sidecar_path(opt.embeddings));
    if (sidecar && sidecar->parameters.contains("method")) {
        report << "method " << sidecar->parameters["method"].get<std::string>() << '\n';
    }
    report << "entries " << data.size() << '\n';
    for (const auto& [name, count] : per_class) {
        report << "class " << name << ' ' << count << '\n';
    }
    double mean = 0;
    for (std::size_t r = 0; r < opt.repeats; ++r) {
        auto seed = derive_seed(opt.seed, "classify", r);
        auto res = train_classifier(data, opt.split, seed, opt.epochs, opt.lr);
        report << "repeat " << (r + 1) << " accuracy " << fixed(res.accuracy) << '\n';
        mean += res.accuracy;
    }
    mean /= static_cast<double>(opt.repeats);
    report << "mean accuracy " << fixed(mean) << '\n';

    out << report.str();
    if (!opt.out.empty()) {
        write_text(opt.out, report.str());
        RunManifest m;
        m.subcommand = "classify";
        m.seed = opt.seed;
        m.parameters = { { "tau", opt.tau }, { "repeats", opt.repeats }, { "split", opt.split }, { "epochs", opt.epochs }, { "lr", opt.lr } };
        m.inputs = { { "embeddings", opt.embeddings }, { "graph", opt.graph }, { "labels", opt.labels } };
        m.outputs = { { "report", opt.out } };
        m.write(sidecar_path(opt.out));
    }
    return 0;
}

inline int run_changepoint(const ChangepointOptions& opt, std::ostream& out) {
    auto g = load_manifest(opt.graph);
    auto labels = load_labels(opt.labels, g);
    std::vector<std::vector<std::string>> sequences;
    if (opt.level == "node") {
        sequences = node_label_sequences(labels);
    } else if (opt.level == "window") {
        if (opt.tau < 0 || opt.tau >= g.steps()) {
            throw WindowError("window of size " + std::to_string(opt.tau) + " does not fit in " + std::to_string(g.steps()) + " snapshots");
        }
        sequences = window_label_sequences(labels, opt.tau, g.steps());
    } else {
        throw ValidationError("--level must be 'node' or 'window'");
    }
    if (sequences.empty()) {
        throw ValidationError("no labeled nodes");
    }
    auto summary = change_point_histogram(sequences, opt.unit);
    std::ostringstream csv;
    write_histogram_csv(csv, summary);
    write_text(opt.out, csv.str());

    RunManifest m;
    m.subcommand = "changepoint";
    m.parameters = { { "level", opt.level }, { "tau", opt.tau }, { "unit", opt.unit } };
    m.inputs = { { "graph", opt.graph }, { "labels", opt.labels } };
    m.outputs = { { "histogram", opt.out } };
    m.write(sidecar_path(opt.out));
    out << "completed runs " << summary.completed_runs << '\n';
    out << "mean duration " << fixed(summary.mean_duration) << '\n';
    return 0;
}

inline int run_arith(const ArithOptions& opt, std::ostream& out) {
    auto g = load_manifest(opt.graph);
    auto labels = load_labels(opt.labels, g);
    auto emb = resolve_tokens(load_embeddings(fs::path(opt.embeddings)), g);
    auto sets = arithmetic_sets(emb, labels, opt.tau, opt.class_a, opt.class_b);
    if (sets.pure_a.empty() || sets.pure_b.empty() || sets.mixed.empty()) {
        throw ValidationError("arithmetic needs nonempty pure-" + opt.class_a + ", pure-" + opt.class_b + " and mixed sets (found " +
                              std::to_string(sets.pure_a.size()) + ", " + std::to_string(sets.pure_b.size()) + ", " + std::to_string(sets.mixed.size()) + ")");
    }
    auto res = embedding_arithmetic(sets.mixed, sets.pure_a, sets.centroids(), opt.samples, opt.seed);

    std::ostringstream report;
    report << "pure " << opt.class_a << ' ' << sets.pure_a.size() << '\n';
    report << "pure " << opt.class_b << ' ' << sets.pure_b.size() << '\n';
    report << "mixed " << sets.mixed.size() << '\n';
    report << "differences " << res.differences.size() << '\n';
    report << "nearest " << opt.class_a << ' ' << res.counts[0] << '\n';
    report << "nearest " << opt.class_b << ' ' << res.counts[1] << '\n';
    report << "nearest mixed " << res.counts[2] << '\n';
    report << "fraction nearest " << opt.class_b << ' ' << fixed(res.fraction_b) << '\n';
    out << report.str();
    if (!opt.out.empty()) {
        write_text(opt.out, report.str());
        RunManifest m;
        m.subcommand = "arith";
        m.seed = opt.seed;
        m.parameters = { { "tau", opt.tau }, { "class_a", opt.class_a }, { "class_b", opt.class_b }, { "samples", opt.samples } };
        m.inputs = { { "embeddings", opt.embeddings }, { "graph", opt.graph }, { "labels", opt.labels } };
        m.outputs = { { "report", opt.out } };
        m.write(sidecar_path(opt.out));
    }
    return 0;
}

inline int run_pca(const PcaOptions& opt, std::ostream& out) {
    auto g = load_manifest(opt.graph);
    auto labels = load_labels(opt.labels, g);
    auto named = load_embeddings(fs::path(opt.embeddings));
    auto emb = resolve_tokens(named, g);

    std::vector<std::string> tags;
    tags.reserve(emb.tokens.size());
    std::map<TimeStep, std::map<NodeId, std::set<std::string>>> by_time;
    for (const auto& tok : emb.tokens) {
        std::string tag = "unlabeled";
        if (tok.time - opt.tau >= 1) {
            auto [it, inserted] = by_time.try_emplace(tok.time);
            if (inserted) {
                it->second = window_label_sets(labels, tok.time, opt.tau);
            }
            auto found = it->second.find(tok.node);
            if (found != it->second.end()) {
                tag = found->second.size() == 1 ? class_name(TrajectoryClass::stable) + ":" + *found->second.begin()
                                                 : class_name(TrajectoryClass::switching);
            }
        }
        tags.push_back(std::move(tag));
    }

    auto pca = pca_project(emb.vectors, opt.components);
    std::ostringstream csv;
    csv << std::setprecision(17);
    write_pca_csv(csv, named.tokens, tags, pca);
    write_text(opt.out, csv.str());

    RunManifest m;
    m.subcommand = "pca";
    m.parameters = { { "tau", opt.tau }, { "components", opt.components } };
    m.inputs = { { "embeddings", opt.embeddings }, { "graph", opt.graph }, { "labels", opt.labels } };
    m.outputs = { { "coordinates", opt.out } };
    m.write(sidecar_path(opt.out));
    out << "explained variance";
    for (double r : pca.explained_ratio) {
        out << ' ' << fixed(r);
    }
    out << '\n';
    return 0;
}

}

/**
 * Entry point. Returns 0 on success, 1 on validation or runtime failure and
 * 2 on usage errors.
 */
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{ "Trajectory representations of nodes in temporal graphs" };
    app.name("stwalk");
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* generate = app.add_subcommand("generate", "Write a planted synthetic temporal graph dataset");
    generate->add_option("--out", gen.out, "Output directory")->required();
    generate->add_option("--nodes", gen.synth.nodes, "Number of nodes")->capture_default_str();
    generate->add_option("--steps", gen.synth.steps, "Number of snapshots")->capture_default_str();
    generate->add_option("--communities", gen.synth.communities, "Number of communities")->capture_default_str();
    generate->add_option("--p-in", gen.synth.p_in, "Within-community edge probability")->capture_default_str();
    generate->add_option("--p-out", gen.synth.p_out, "Cross-community edge probability")->capture_default_str();
    generate->add_option("--switchers", gen.synth.switcher_fraction, "Fraction of nodes that switch community once")->capture_default_str();
    generate->add_option("--seed", gen.synth.seed, "Random seed")->capture_default_str();

    EmbedOptions emb;
    auto* embed_cmd = app.add_subcommand("embed", "Learn trajectory vectors");
    embed_cmd->add_option("--graph", emb.graph, "Snapshot manifest")->required();
    embed_cmd->add_option("--method", emb.method, "stwalk1 | stwalk2 | pagerank | avg-deepwalk")->required();
    embed_cmd->add_option("--out", emb.out, "Embedding file")->required();
    embed_cmd->add_option("--dim", emb.dim, "Embedding dimension")->capture_default_str();
    embed_cmd->add_option("--tau", emb.tau, "Temporal window size")->capture_default_str();
    embed_cmd->add_option("--walk-len", emb.walk_len, "Random walk length")->capture_default_str();
    embed_cmd->add_option("--space-walk-len", emb.space_walk_len, "stwalk2 space walk length (default: --walk-len)");
    embed_cmd->add_option("--time-walk-len", emb.time_walk_len, "stwalk2 time walk length (default: --walk-len)");
    embed_cmd->add_option("--restarts", emb.restarts, "Walks per start node")->capture_default_str();
    embed_cmd->add_option("--vocab-window", emb.vocab_window, "SkipGram context window")->capture_default_str();
    embed_cmd->add_option("--negatives", emb.negatives, "Negative samples per pair")->capture_default_str();
    embed_cmd->add_option("--epochs", emb.epochs, "SkipGram epochs")->capture_default_str();
    embed_cmd->add_option("--lr", emb.lr, "Initial learning rate")->capture_default_str();
    embed_cmd->add_option("--seed", emb.seed, "Random seed")->capture_default_str();
    embed_cmd->add_option("--threads", emb.threads, "Worker threads (1 is deterministic)")->capture_default_str();
    embed_cmd->add_option("--t", emb.times, "Window end time steps (default: every window that fits)");
    embed_cmd->add_option("--damping", emb.damping, "PageRank damping")->capture_default_str();

    ClassifyOptions cls;
    auto* classify = app.add_subcommand("classify", "Trajectory classification accuracy");
    classify->add_option("--embeddings", cls.embeddings, "Embedding file")->required();
    classify->add_option("--graph", cls.graph, "Snapshot manifest")->required();
    classify->add_option("--labels", cls.labels, "Node label file")->required();
    classify->add_option("--out", cls.out, "Report file");
    classify->add_option("--tau", cls.tau, "Temporal window size")->capture_default_str();
    classify->add_option("--repeats", cls.repeats, "Random splits to average")->capture_default_str();
    classify->add_option("--split", cls.split, "Training fraction")->capture_default_str();
    classify->add_option("--epochs", cls.epochs, "Classifier epochs")->capture_default_str();
    classify->add_option("--lr", cls.lr, "Classifier learning rate")->capture_default_str();
    classify->add_option("--seed", cls.seed, "Random seed")->capture_default_str();

    ChangepointOptions cp;
    auto* changepoint = app.add_subcommand("changepoint", "Histogram of time spent under one label");
    changepoint->add_option("--graph", cp.graph, "Snapshot manifest")->required();
    changepoint->add_option("--labels", cp.labels, "Node label file")->required();
    changepoint->add_option("--out", cp.out, "CSV output")->required();
    changepoint->add_option("--level", cp.level, "node (node-label runs) or window (trajectory-label runs)")->capture_default_str();
    changepoint->add_option("--tau", cp.tau, "Window size for --level window")->capture_default_str();
    changepoint->add_option("--unit", cp.unit, "Duration of one step")->capture_default_str();

    ArithOptions ar;
    auto* arith = app.add_subcommand("arith", "Mixed minus pure-A nearest-centroid check");
    arith->add_option("--embeddings", ar.embeddings, "Embedding file")->required();
    arith->add_option("--graph", ar.graph, "Snapshot manifest")->required();
    arith->add_option("--labels", ar.labels, "Node label file")->required();
    arith->add_option("--out", ar.out, "Report file");
    arith->add_option("--tau", ar.tau, "Temporal window size")->capture_default_str();
    arith->add_option("--class-a", ar.class_a, "Node label of the subtracted pure class")->capture_default_str();
    arith->add_option("--class-b", ar.class_b, "Node label of the expected pure class")->capture_default_str();
    arith->add_option("--samples", ar.samples, "Pairs to sample (0: all pairs)")->capture_default_str();
    arith->add_option("--seed", ar.seed, "Random seed")->capture_default_str();

    PcaOptions pc;
    auto* pca = app.add_subcommand("pca", "Principal component coordinates as CSV");
    pca->add_option("--embeddings", pc.embeddings, "Embedding file")->required();
    pca->add_option("--graph", pc.graph, "Snapshot manifest")->required();
    pca->add_option("--labels", pc.labels, "Node label file")->required();
    pca->add_option("--out", pc.out, "CSV output")->required();
    pca->add_option("--tau", pc.tau, "Temporal window size")->capture_default_str();
    pca->add_option("--components", pc.components, "Number of components")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const CLI::App* sub = nullptr;
        for (auto* s : app.get_subcommands()) {
            sub = s;
        }
        err << (sub ? sub->help() : app.help());
        return 2;
    }

    auto started = std::chrono::steady_clock::now();
    std::string name;
    try {
        int code = 0;
        if (generate->parsed()) {
            name = "generate";
            code = detail::run_generate(gen, out);
        } else if (embed_cmd->parsed()) {
            name = "embed";
            code = detail::run_embed(emb, out);
        } else if (classify->parsed()) {
            name = "classify";
            code = detail::run_classify(cls, out);
        } else if (changepoint->parsed()) {
            name = "changepoint";
            code = detail::run_changepoint(cp, out);
        } else if (arith->parsed()) {
            name = "arith";
            code = detail::run_arith(ar, out);
        } else if (pca->parsed()) {
            name = "pca";
            code = detail::run_pca(pc, out);
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        err << name << " finished in " << detail::fixed(secs, 2) << "s\n";
        return code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}

#endif
