// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "stwalk_cli.hpp"

using namespace stwalk;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s [%d] %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += !pass;
}

std::string fmt(double x, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << std::fixed << x;
    return s.str();
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

double mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) {
        s += x;
    }
    return s / static_cast<double>(xs.size());
}

std::string list(const std::vector<double>& xs) {
    std::string out;
    for (double x : xs) {
        out += (out.empty() ? "" : " ") + fmt(x, 3);
    }
    return out;
}

ResolvedEmbeddings resolved(const TrajectoryEmbedding& emb) {
    ResolvedEmbeddings out;
    for (std::size_t i = 0; i < emb.size(); ++i) {
        out.tokens.push_back(Token{ emb.nodes[i], emb.time });
        out.vectors.push_back(emb.vectors[i]);
    }
    return out;
}

struct Planted {
    std::map<Method, std::vector<double>> accuracy;
    std::vector<double> arithmetic;
    double seconds = 0;
};

/// N=300, T=10 planted data, tau=5, d=32, L=30, rho=10, dataset seeds 1..5.
Planted planted_experiment() {
    Planted out;
    const std::vector<Method> methods{ Method::stwalk1, Method::stwalk2, Method::node_pagerank, Method::avg_deepwalk };
    auto start = std::chrono::steady_clock::now();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthConfig cfg;
        cfg.seed = seed;
        auto data = generate_planted(cfg);
        StwalkParams params;
        params.tau = 5;
        params.walk_length = params.space_walk_length = params.time_walk_length = 30;
        params.restarts = 10;
        params.train.dim = 32;
        params.seed = seed;
        const TimeStep t = cfg.steps;
        for (auto m : methods) {
            auto emb = embed(data.graph, t, m, params);
            TrajectoryDataset ds;
            append_labeled(ds, emb, data.labels, params.tau);
            out.accuracy[m].push_back(train_classifier(ds, 0.7, seed).accuracy);
            if (m == Method::stwalk2) {
                auto sets = arithmetic_sets(resolved(emb), data.labels, params.tau, community_label(0), community_label(1));
                auto res = embedding_arithmetic(sets.mixed, sets.pure_a, sets.centroids());
                out.arithmetic.push_back(res.fraction_b);
            }
        }
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

void gradients() {
    Rng rng(20240601);
    std::uniform_int_distribution<std::size_t> dims(1, 16), ks(0, 5);
    std::normal_distribution<double> normal(0.0, 0.7);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        auto d = dims(rng);
        auto draw = [&] {
            std::vector<double> v(d);
            for (auto& x : v) {
                x = normal(rng);
            }
            return v;
        };
        auto u = draw();
        auto v = draw();
        std::vector<std::vector<double>> negs(ks(rng));
        for (auto& n : negs) {
            n = draw();
        }
        std::vector<std::span<const double>> spans(negs.begin(), negs.end());
        auto res = pair_loss_and_gradients(u, v, spans);
        auto check = [&](const std::vector<double>& analytic, const std::vector<double>& numeric) {
            double diff = 0, na = 0, nn = 0;
            for (std::size_t j = 0; j < analytic.size(); ++j) {
                diff += (analytic[j] - numeric[j]) * (analytic[j] - numeric[j]);
                na += analytic[j] * analytic[j];
                nn += numeric[j] * numeric[j];
            }
            worst = std::max(worst, std::sqrt(diff) / std::max({ 1e-10, std::sqrt(na), std::sqrt(nn) }));
        };
        check(res.gradients.center, oracle::numeric_gradient([&](const std::vector<double>& x) { return oracle::ns_loss(x, v, negs); }, u));
        check(res.gradients.context, oracle::numeric_gradient([&](const std::vector<double>& x) { return oracle::ns_loss(u, x, negs); }, v));
        for (std::size_t j = 0; j < negs.size(); ++j) {
            check(res.gradients.negatives[j], oracle::numeric_gradient(
                                                  [&](const std::vector<double>& x) {
                                                      auto copy = negs;
                                                      copy[j] = x;
                                                      return oracle::ns_loss(u, v, copy);
                                                  },
                                                  negs[j]));
        }
    }
    report(3, "SkipGram gradients vs central differences (eps=1e-5, 100 instances, d<=16)", worst < 1e-4,
           "max relative error " + sci(worst) + " (limit 1e-4)");
}

void zero_init() {
    bool ok = true;
    double worst = 0;
    for (std::size_t k = 0; k <= 10; ++k) {
        for (std::size_t d : { 1u, 8u, 64u }) {
            std::vector<double> zero(d, 0.0);
            std::vector<std::vector<double>> negs(k, zero);
            std::vector<std::span<const double>> spans(negs.begin(), negs.end());
            double loss = pair_loss_and_gradients(zero, zero, spans).loss;
            double want = static_cast<double>(1 + k) * std::numbers::ln2;
            worst = std::max(worst, std::abs(loss - want));
            ok = ok && std::abs(loss - want) <= 4 * std::numeric_limits<double>::epsilon() * want;
        }
    }
    report(4, "zero-initialization loss equals (1+k) ln 2", ok, "max |loss - (1+k) ln 2| = " + sci(worst) + " over k=0..10");
}

void pagerank_check() {
    Rng rng(77);
    double worst_sum = 0, worst_entry = 0;
    int graphs = 0;
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t n = 1 + static_cast<std::size_t>(trial % 10);
        std::bernoulli_distribution edge(0.1 + 0.1 * (trial % 5));
        std::bernoulli_distribution present(0.85);
        std::vector<bool> here(n);
        auto name = [](std::size_t i) { return "v" + std::to_string(i); };
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t i = 0; i < n; ++i) {
            here[i] = i == 0 || present(rng);
        }
        // every node is present at step 2, so absent-at-1 nodes stay in the universe
        TemporalGraphBuilder only;
        only.add_snapshot();
        only.add_snapshot();
        for (std::size_t i = 0; i < n; ++i) {
            if (here[i]) {
                only.add_node(name(i), 1);
            }
            only.add_node(name(i), 2);
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (here[i] && here[j] && edge(rng)) {
                    only.add_edge(name(i), name(j), 1);
                    edges.emplace_back(i, j);
                }
            }
        }
        auto g = only.build();
        // ids follow name order; map oracle indices through names
        std::vector<std::pair<std::size_t, std::size_t>> id_edges;
        for (auto [i, j] : edges) {
            id_edges.emplace_back(g.id(name(i)), g.id(name(j)));
        }
        std::vector<bool> id_present(n);
        for (std::size_t i = 0; i < n; ++i) {
            id_present[g.id(name(i))] = here[i];
        }
        auto pr = pagerank(g.snapshot(1));
        auto want = oracle::dense_pagerank(n, id_edges, id_present, 0.85);
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            total += pr[i];
            worst_entry = std::max(worst_entry, std::abs(pr[i] - want[i]));
        }
        worst_sum = std::max(worst_sum, std::abs(total - 1.0));
        ++graphs;
    }
    // larger graphs: the sum property only
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthConfig cfg;
        cfg.seed = seed;
        auto data = generate_planted(cfg);
        for (TimeStep t = 1; t <= data.graph.steps(); ++t) {
            auto pr = pagerank(data.graph.snapshot(t));
            double total = 0;
            for (double x : pr) {
                total += x;
            }
            worst_sum = std::max(worst_sum, std::abs(total - 1.0));
            ++graphs;
        }
    }
    report(5, "PageRank sums to 1 and matches dense oracle on <=10 nodes", worst_sum <= 1e-9 && worst_entry <= 1e-8,
           std::to_string(graphs) + " graphs, max |sum-1| " + sci(worst_sum) + ", max entry error " + sci(worst_entry));
}

void spacetime_examples() {
    const oracle::EdgeLists example = { { { "u", "d" } }, { { "u", "c" } }, { { "u", "a" }, { "u", "b" } } };
    auto g = oracle::build(example);
    auto st = oracle::sets_of(create_space_time_graph(g, 2, "u", 3), g);
    auto to = oracle::sets_of(create_time_only_graph(g, 2, "u", 3), g);
    using S = std::set<std::string>;
    using E = std::set<oracle::Edge>;
    bool ok7 = st.tokens == S{ "u@3", "a@3", "b@3", "u@2", "c@2", "u@1", "d@1" } &&
               st.spatial == E{ oracle::key("u@3", "a@3"), oracle::key("u@3", "b@3"), oracle::key("u@2", "c@2"), oracle::key("u@1", "d@1") } &&
               st.temporal == E{ oracle::key("u@3", "u@2"), oracle::key("u@2", "u@1") };
    bool ok5 = to.tokens == S{ "u@3", "u@2", "c@2", "u@1", "d@1" } &&
               to.spatial == E{ oracle::key("u@2", "c@2"), oracle::key("u@1", "d@1") } &&
               to.temporal == E{ oracle::key("u@3", "u@2"), oracle::key("u@2", "u@1") };
    report(6, "space-time graph: 7-token example and 5-token time-only example", ok7 && ok5,
           std::string("7-token ") + (ok7 ? "exact" : "MISMATCH") + ", 5-token " + (ok5 ? "exact" : "MISMATCH"));
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "stwalk");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

void determinism() {
    oracle::TempDir dir("acceptance_det");
    auto data = (dir.path() / "data").string();
    bool ok = run_cli({ "generate", "--out", data, "--seed", "7" }) == 0;
    std::string detail;
    for (const char* method : { "stwalk1", "stwalk2", "pagerank", "avg-deepwalk" }) {
        std::string files[2];
        for (int r = 0; r < 2; ++r) {
            auto out = (dir.path() / (std::string(method) + std::to_string(r) + ".txt")).string();
            ok = ok && run_cli({ "embed", "--graph", data + "/manifest.txt", "--method", method, "--out", out, "--dim", "32", "--tau", "5",
                                 "--restarts", "10", "--seed", "11", "--threads", "1", "--t", "10" }) == 0;
            files[r] = oracle::read_file(out);
        }
        bool same = !files[0].empty() && files[0] == files[1];
        ok = ok && same;
        detail += std::string(detail.empty() ? "" : ", ") + method + (same ? " identical" : " DIFFER");
    }
    report(7, "embed with equal seeds and --threads 1 is byte-identical", ok, detail);
}

void pca_check() {
    Rng rng(31);
    std::normal_distribution<double> normal;
    double worst = 0;
    bool ordered = true;
    for (std::size_t d = 2; d <= 20; ++d) {
        Eigen::MatrixXd Q(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < Q.size(); ++i) {
            Q.data()[i] = normal(rng);
        }
        Eigen::MatrixXd R = Eigen::HouseholderQR<Eigen::MatrixXd>(Q).householderQ();
        std::vector<Vector> rows(50, Vector(d));
        for (auto& row : rows) {
            Eigen::VectorXd z(static_cast<Eigen::Index>(d));
            for (std::size_t j = 0; j < d; ++j) {
                z(static_cast<Eigen::Index>(j)) = normal(rng) * 4.0 / (1.0 + static_cast<double>(j));
            }
            Eigen::VectorXd x = R * z;
            for (std::size_t j = 0; j < d; ++j) {
                row[j] = x(static_cast<Eigen::Index>(j));
            }
        }
        const std::size_t k = std::min<std::size_t>(d, 4);
        auto got = pca_project(rows, k);
        auto want = oracle::eigen_pca(rows, k);
        double sum = 0;
        for (std::size_t c = 0; c < k; ++c) {
            sum += got.explained_ratio[c];
            if (c > 0 && got.explained_ratio[c] > got.explained_ratio[c - 1]) {
                ordered = false;
            }
            double sign = 0;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (sign == 0 && std::abs(want.projections[r][c]) > 1e-6) {
                    sign = got.projections[r][c] * want.projections[r][c] > 0 ? 1.0 : -1.0;
                }
                worst = std::max(worst, std::abs(got.projections[r][c] - sign * want.projections[r][c]));
            }
        }
        ordered = ordered && sum <= 1.0 + 1e-12;
    }
    report(9, "PCA ratios nonincreasing, sum <= 1, projections match eigensolver up to sign", ordered && worst <= 1e-6,
           "dims 2..20, max projection error " + sci(worst) + (ordered ? ", ratios ordered" : ", ratios NOT ordered"));
}

void changepoint_check() {
    std::size_t runs = 0, switches = 0;
    for (std::size_t len = 1; len <= 7; ++len) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < len; ++i) {
            total *= 3;
        }
        std::vector<std::vector<std::string>> seqs;
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<std::string> seq;
            for (std::size_t i = 0, c = code; i < len; ++i, c /= 3) {
                seq.emplace_back(1, static_cast<char>('A' + c % 3));
            }
            for (std::size_t i = 1; i < len; ++i) {
                switches += seq[i] != seq[i - 1];
            }
            seqs.push_back(std::move(seq));
        }
        runs += change_point_histogram(seqs).completed_runs;
    }

    std::vector<std::string> per_seed;
    bool planted_ok = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthConfig cfg;
        cfg.seed = seed;
        auto data = generate_planted(cfg);
        double planted = 0;
        std::size_t count = 0;
        for (const auto& p : data.planted) {
            if (p.switch_step) {
                planted += p.switch_step - 1;
                ++count;
            }
        }
        planted /= static_cast<double>(count);
        auto detected = change_point_histogram(node_label_sequences(data.labels)).mean_duration;
        planted_ok = planted_ok && std::abs(detected - planted) <= 0.5;
        per_seed.push_back(fmt(detected, 3) + "/" + fmt(planted, 3));
    }
    std::string detail = "exhaustive runs " + std::to_string(runs) + " vs switches " + std::to_string(switches) + "; detected/planted mean:";
    for (const auto& s : per_seed) {
        detail += " " + s;
    }
    report(10, "change-point bookkeeping", runs == switches && planted_ok, detail);
}

}

int main() {
    Log::silence();
    std::printf("stwalk acceptance\n");

    auto planted = planted_experiment();
    const auto& acc = planted.accuracy;
    double s2 = mean(acc.at(Method::stwalk2));
    double s1 = mean(acc.at(Method::stwalk1));
    double pr = mean(acc.at(Method::node_pagerank));
    double dw = mean(acc.at(Method::avg_deepwalk));
    report(1, "planted experiment: STWalk2 >= 0.85 and >= PageRank + 0.10, runtime <= 5 min",
           s2 >= 0.85 && s2 - pr >= 0.10 && planted.seconds <= 300,
           "STWalk2 " + fmt(s2) + " [" + list(acc.at(Method::stwalk2)) + "], PageRank " + fmt(pr) + " [" + list(acc.at(Method::node_pagerank)) +
               "], margin " + fmt(s2 - pr) + ", " + fmt(planted.seconds, 1) + "s for all four methods");
    report(2, "method ordering: STWalk2 >= STWalk1 - 0.03 and STWalk1 > Avg DeepWalk", s2 >= s1 - 0.03 && s1 > dw,
           "STWalk2 " + fmt(s2) + ", STWalk1 " + fmt(s1) + " [" + list(acc.at(Method::stwalk1)) + "], Avg DeepWalk " + fmt(dw) + " [" +
               list(acc.at(Method::avg_deepwalk)) + "]");

    gradients();
    zero_init();
    pagerank_check();
    spacetime_examples();
    determinism();

    double arith = mean(planted.arithmetic);
    report(8, "embedding arithmetic: >= 70% of (mixed - pure A) nearest pure-B centroid", arith >= 0.7,
           "STWalk2 fraction per seed [" + list(planted.arithmetic) + "], mean " + fmt(arith));

    pca_check();
    changepoint_check();

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
