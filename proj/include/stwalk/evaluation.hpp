#ifndef STWALK_EVALUATION_HPP
#define STWALK_EVALUATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "stwalk.hpp"
#include "temporal_graph.hpp"

namespace stwalk {

/// Two-class trajectory label: constant node label over the window or not.
enum class TrajectoryClass { stable, switching };

inline std::string class_name(TrajectoryClass c) {
    return c == TrajectoryClass::stable ? "Expert" : "Interdisciplinary";
}

inline std::optional<TrajectoryClass> parse_class(std::string_view name) {
    if (name == "Expert") {
        return TrajectoryClass::stable;
    }
    if (name == "Interdisciplinary") {
        return TrajectoryClass::switching;
    }
    return std::nullopt;
}

/**
 * Labels each node from its node labels over [t - tau, t]: a single distinct
 * label is stable, more than one is switching. Nodes with fewer than two
 * labeled steps in the window are left out.
 */
inline std::map<NodeId, TrajectoryClass> derive_trajectory_labels(const NodeLabelTable& labels, TimeStep t, int tau) {
    if (tau < 0 || t - tau < 1) {
        throw WindowError("window of size " + std::to_string(tau) + " ending at t=" + std::to_string(t) + " starts before the first snapshot");
    }
    struct Seen {
        std::size_t steps = 0;
        const std::string* first = nullptr;
        bool changed = false;
    };
    std::map<NodeId, Seen> seen;
    for (const auto& [tok, label] : labels.entries()) {
        if (tok.time < t - tau || tok.time > t) {
            continue;
        }
        auto& s = seen[tok.node];
        ++s.steps;
        if (!s.first) {
            s.first = &label;
        } else if (*s.first != label) {
            s.changed = true;
        }
    }
    std::map<NodeId, TrajectoryClass> out;
    for (const auto& [node, s] : seen) {
        if (s.steps >= 2) {
            out.emplace(node, s.changed ? TrajectoryClass::switching : TrajectoryClass::stable);
        }
    }
    return out;
}

struct TrajectoryExample {
    NodeId node = 0;
    TimeStep time = 0;
    Vector features;
    std::string label;
};

struct TrajectoryDataset {
    std::vector<TrajectoryExample> entries;

    std::size_t size() const {
        return entries.size();
    }

    std::size_t dim() const {
        return entries.empty() ? 0 : entries.front().features.size();
    }

    void add(TrajectoryExample ex) {
        if (!entries.empty() && ex.features.size() != dim()) {
            throw ValidationError("trajectory vector has dimension " + std::to_string(ex.features.size()) + ", expected " + std::to_string(dim()));
        }
        entries.push_back(std::move(ex));
    }

    std::vector<std::string> classes() const {
        std::set<std::string> names;
        for (const auto& e : entries) {
            names.insert(e.label);
        }
        return { names.begin(), names.end() };
    }
};

/// Pairs each trajectory vector with its derived label; unlabeled nodes are dropped.
inline void append_labeled(TrajectoryDataset& out, const TrajectoryEmbedding& emb, const NodeLabelTable& labels, int tau) {
    auto classes = derive_trajectory_labels(labels, emb.time, tau);
    for (std::size_t i = 0; i < emb.size(); ++i) {
        auto it = classes.find(emb.nodes[i]);
        if (it != classes.end()) {
            out.add(TrajectoryExample{ emb.nodes[i], emb.time, emb.vectors[i], class_name(it->second) });
        }
    }
}

/**
 * Multinomial logistic regression on standardized features.
 */
struct LinearClassifier {
    std::vector<std::string> classes;
    /// classes x dim, row-major
    std::vector<Vector> weights;
    Vector bias;
    Vector mean;
    Vector stddev;

    Vector scores(std::span<const double> x) const {
        Vector out(classes.size());
        for (std::size_t c = 0; c < classes.size(); ++c) {
            double s = bias[c];
            for (std::size_t i = 0; i < x.size(); ++i) {
                s += weights[c][i] * (x[i] - mean[i]) / stddev[i];
            }
            out[c] = s;
        }
        return out;
    }

    std::size_t predict(std::span<const double> x) const {
        auto s = scores(x);
        return static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
    }

    const std::string& predict_label(std::span<const double> x) const {
        return classes[predict(x)];
    }
};

struct ClassificationResult {
    LinearClassifier model;
    double accuracy = 0;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    /// Predicted class index per test entry, aligned with test_indices.
    std::vector<std::size_t> predictions;
};

/**
 * Stratified split (`train_ratio` of each class to training), standardization
 * on training statistics, and plain SGD on the softmax cross-entropy.
 * Returns held-out accuracy.
 */
inline ClassificationResult train_classifier(const TrajectoryDataset& data, double train_ratio, std::uint64_t seed,
                                             std::size_t epochs = 50, double learning_rate = 0.05)
{
    if (data.size() < 10) {
        throw ValidationError("classification needs at least 10 entries, got " + std::to_string(data.size()));
    }
    if (!(train_ratio > 0 && train_ratio < 1)) {
        throw ValidationError("train ratio must lie in (0, 1)");
    }
    auto classes = data.classes();
    if (classes.size() < 2) {
        throw ValidationError("classification needs at least two classes");
    }
    const std::size_t dim = data.dim();
    const std::size_t k = classes.size();
    std::vector<std::size_t> target(data.size());
    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < data.size(); ++i) {
        target[i] = static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), data.entries[i].label) - classes.begin());
        by_class[target[i]].push_back(i);
    }

    auto rng = make_rng(seed);
    ClassificationResult res;
    for (auto& members : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        auto n_train = static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(members.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, members.size());
        res.train_indices.insert(res.train_indices.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
        res.test_indices.insert(res.test_indices.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
    }
    std::sort(res.train_indices.begin(), res.train_indices.end());
    std::sort(res.test_indices.begin(), res.test_indices.end());
    if (res.test_indices.empty()) {
        throw ValidationError("split leaves no test entries");
    }

    auto& model = res.model;
    model.classes = classes;
    model.mean.assign(dim, 0.0);
    model.stddev.assign(dim, 0.0);
    const double n_train = static_cast<double>(res.train_indices.size());
    for (auto i : res.train_indices) {
        for (std::size_t j = 0; j < dim; ++j) {
            model.mean[j] += data.entries[i].features[j];
        }
    }
    for (auto& m : model.mean) {
        m /= n_train;
    }
    for (auto i : res.train_indices) {
        for (std::size_t j = 0; j < dim; ++j) {
            double d = data.entries[i].features[j] - model.mean[j];
            model.stddev[j] += d * d;
        }
    }
    for (auto& s : model.stddev) {
        s = std::max(std::sqrt(s / n_train), 1e-12);
    }

    std::vector<Vector> z(data.size(), Vector(dim));
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            z[i][j] = (data.entries[i].features[j] - model.mean[j]) / model.stddev[j];
        }
    }

    model.weights.assign(k, Vector(dim, 0.0));
    model.bias.assign(k, 0.0);
    auto order = res.train_indices;
    Vector logits(k), grad(k);
    for (std::size_t e = 0; e < epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        for (auto i : order) {
            const auto& x = z[i];
            for (std::size_t c = 0; c < k; ++c) {
                logits[c] = model.bias[c] + std::inner_product(x.begin(), x.end(), model.weights[c].begin(), 0.0);
            }
            double top = *std::max_element(logits.begin(), logits.end());
            double sum = 0;
            for (std::size_t c = 0; c < k; ++c) {
                grad[c] = std::exp(logits[c] - top);
                sum += grad[c];
            }
            for (std::size_t c = 0; c < k; ++c) {
                grad[c] = grad[c] / sum - (c == target[i] ? 1.0 : 0.0);
                model.bias[c] -= learning_rate * grad[c];
                for (std::size_t j = 0; j < dim; ++j) {
                    model.weights[c][j] -= learning_rate * grad[c] * x[j];
                }
            }
        }
    }

    std::size_t correct = 0;
    for (auto i : res.test_indices) {
        auto p = model.predict(data.entries[i].features);
        res.predictions.push_back(p);
        correct += (p == target[i]);
    }
    res.accuracy = static_cast<double>(correct) / static_cast<double>(res.test_indices.size());
    return res;
}

struct ChangePointSummary {
    /// duration (runs x time unit) -> number of completed runs
    std::map<double, std::size_t> histogram;
    std::size_t completed_runs = 0;
    double mean_duration = 0;
};

/**
 * Run-length bookkeeping over per-node label sequences. A run counts only
 * when a label change ends it; the final run of every sequence is censored.
 */
inline ChangePointSummary change_point_histogram(const std::vector<std::vector<std::string>>& sequences, double time_unit = 1.0) {
    if (!(time_unit > 0)) {
        throw ValidationError("time unit must be positive");
    }
    ChangePointSummary out;
    double total = 0;
    for (const auto& seq : sequences) {
        std::size_t run = 0;
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (i > 0 && seq[i] != seq[i - 1]) {
                double duration = static_cast<double>(run) * time_unit;
                ++out.histogram[duration];
                ++out.completed_runs;
                total += duration;
                run = 0;
            }
            ++run;
        }
    }
    out.mean_duration = out.completed_runs ? total / static_cast<double>(out.completed_runs) : 0.0;
    return out;
}

/// Per node, its node labels in time order (unlabeled steps skipped).
inline std::vector<std::vector<std::string>> node_label_sequences(const NodeLabelTable& labels) {
    std::map<NodeId, std::vector<std::string>> seqs;
    for (const auto& [tok, label] : labels.entries()) {
        seqs[tok.node].push_back(label);
    }
    std::vector<std::vector<std::string>> out;
    for (auto& [node, seq] : seqs) {
        out.push_back(std::move(seq));
    }
    return out;
}

/**
 * Per node, its trajectory class over consecutive windows ending at
 * tau+1, ..., steps. Windows where the node is unlabeled are skipped.
 */
inline std::vector<std::vector<std::string>> window_label_sequences(const NodeLabelTable& labels, int tau, TimeStep steps) {
    std::map<NodeId, std::vector<std::string>> seqs;
    for (TimeStep t = tau + 1; t <= steps; ++t) {
        for (const auto& [node, c] : derive_trajectory_labels(labels, t, tau)) {
            seqs[node].push_back(class_name(c));
        }
    }
    std::vector<std::vector<std::string>> out;
    for (auto& [node, seq] : seqs) {
        out.push_back(std::move(seq));
    }
    return out;
}

inline void write_histogram_csv(std::ostream& out, const ChangePointSummary& summary) {
    out << "duration,count\n";
    for (const auto& [duration, count] : summary.histogram) {
        out << duration << ',' << count << '\n';
    }
}

inline Vector centroid(const std::vector<Vector>& vectors) {
    if (vectors.empty()) {
        throw ValidationError("centroid of an empty set");
    }
    Vector out(vectors.front().size(), 0.0);
    for (const auto& v : vectors) {
        if (v.size() != out.size()) {
            throw ValidationError("vectors of unequal dimension");
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            out[i] += v[i];
        }
    }
    for (auto& x : out) {
        x /= static_cast<double>(vectors.size());
    }
    return out;
}

/// Index of the nearest centroid by Euclidean distance; ties go to the earliest.
inline std::size_t nearest_centroid(std::span<const double> x, const std::vector<Vector>& centroids) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        double d = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double diff = x[i] - centroids[c][i];
            d += diff * diff;
        }
        if (d < best_dist) {
            best_dist = d;
            best = c;
        }
    }
    return best;
}

struct ArithmeticCentroids {
    Vector pure_a;
    Vector pure_b;
    Vector mixed;
};

struct ArithmeticResult {
    /// Fraction of differences whose nearest centroid is pure_b.
    double fraction_b = 0;
    /// Counts per centroid in declaration order: pure_a, pure_b, mixed.
    std::array<std::size_t, 3> counts{};
    std::vector<Vector> differences;
};

/**
 * Forms x - y for x in `mixed`, y in `pure_a` and assigns each difference to
 * the nearest centroid. With `samples` = 0 every pair is used, otherwise that
 * many pairs are drawn uniformly with replacement.
 */
inline ArithmeticResult embedding_arithmetic(const std::vector<Vector>& mixed, const std::vector<Vector>& pure_a,
                                             const ArithmeticCentroids& centroids, std::size_t samples = 0, std::uint64_t seed = 1)
{
    if (mixed.empty() || pure_a.empty()) {
        throw ValidationError("embedding arithmetic needs nonempty mixed and pure sets");
    }
    const std::vector<Vector> cents{ centroids.pure_a, centroids.pure_b, centroids.mixed };
    const std::size_t dim = cents.front().size();
    for (const auto& c : cents) {
        if (c.size() != dim) {
            throw ValidationError("centroids of unequal dimension");
        }
    }

    ArithmeticResult out;
    auto visit = [&](const Vector& x, const Vector& y) {
        if (x.size() != dim || y.size() != dim) {
            throw ValidationError("vector dimension does not match the centroids");
        }
        Vector diff(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            diff[i] = x[i] - y[i];
        }
        ++out.counts[nearest_centroid(diff, cents)];
        out.differences.push_back(std::move(diff));
    };

    if (samples == 0) {
        for (const auto& x : mixed) {
            for (const auto& y : pure_a) {
                visit(x, y);
            }
        }
    } else {
        auto rng = make_rng(seed);
        std::uniform_int_distribution<std::size_t> pick_x(0, mixed.size() - 1), pick_y(0, pure_a.size() - 1);
        for (std::size_t s = 0; s < samples; ++s) {
            auto xi = pick_x(rng);
            auto yi = pick_y(rng);
            visit(mixed[xi], pure_a[yi]);
        }
    }
    out.fraction_b = static_cast<double>(out.counts[1]) / static_cast<double>(out.differences.size());
    return out;
}

struct PcaResult {
    /// n x k
    std::vector<Vector> projections;
    /// Descending, as fractions of total variance.
    Vector explained_ratio;
    /// k unit vectors (zero where the data has no remaining variance).
    std::vector<Vector> components;
    Vector mean;
};

/**
 * Top-k principal components by power iteration on the sample covariance,
 * deflating after each component. Components are sign-normalized so that
 * their largest-magnitude entry is positive.
 */
inline PcaResult pca_project(const std::vector<Vector>& vectors, std::size_t k = 2,
                             std::size_t max_iterations = 20000, double tolerance = 1e-13)
{
    if (k < 1) {
        throw ValidationError("PCA needs at least one component");
    }
    if (vectors.size() < k + 1) {
        throw ValidationError("PCA with k=" + std::to_string(k) + " needs at least " + std::to_string(k + 1) + " vectors");
    }
    const std::size_t n = vectors.size();
    const std::size_t d = vectors.front().size();
    if (k > d) {
        throw ValidationError("cannot extract more components than dimensions");
    }

    PcaResult out;
    out.mean = centroid(vectors);
    std::vector<Vector> centered(n, Vector(d));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < d; ++i) {
            centered[r][i] = vectors[r][i] - out.mean[i];
        }
    }

    std::vector<Vector> cov(d, Vector(d, 0.0));
    for (const auto& row : centered) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i; j < d; ++j) {
                cov[i][j] += row[i] * row[j];
            }
        }
    }
    double trace = 0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            cov[i][j] /= static_cast<double>(n - 1);
            cov[j][i] = cov[i][j];
        }
        trace += cov[i][i];
    }

    auto matvec = [&](const Vector& v) {
        Vector w(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            w[i] = std::inner_product(cov[i].begin(), cov[i].end(), v.begin(), 0.0);
        }
        return w;
    };
    auto norm = [](const Vector& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); };

    const double floor = trace * 1e-14;
    auto rng = make_rng(0x5eed);
    std::normal_distribution<double> gauss;
    for (std::size_t c = 0; c < k; ++c) {
        Vector v(d);
        for (auto& x : v) {
            x = gauss(rng);
        }
        double lambda = 0;
        bool degenerate = !(trace > 0);
        if (!degenerate) {
            double nv = norm(v);
            for (auto& x : v) {
                x /= nv;
            }
            for (std::size_t it = 0; it < max_iterations; ++it) {
                auto w = matvec(v);
                double nw = norm(w);
                if (nw <= floor) {
                    degenerate = true;
                    break;
                }
                double delta = 0;
                for (std::size_t i = 0; i < d; ++i) {
                    w[i] /= nw;
                    delta += (w[i] - v[i]) * (w[i] - v[i]);
                }
                v = std::move(w);
                if (delta <= tolerance * tolerance) {
                    break;
                }
            }
            if (!degenerate) {
                auto w = matvec(v);
                lambda = std::inner_product(v.begin(), v.end(), w.begin(), 0.0);
                if (lambda <= floor) {
                    degenerate = true;
                }
            }
        }
        if (degenerate) {
            v.assign(d, 0.0);
            lambda = 0;
        } else {
            auto big = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
            if (*big < 0) {
                for (auto& x : v) {
                    x = -x;
                }
            }
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    cov[i][j] -= lambda * v[i] * v[j];
                }
            }
        }
        out.components.push_back(v);
        out.explained_ratio.push_back(trace > 0 ? lambda / trace : 0.0);
    }

    out.projections.assign(n, Vector(k, 0.0));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            out.projections[r][c] = std::inner_product(centered[r].begin(), centered[r].end(), out.components[c].begin(), 0.0);
        }
    }
    return out;
}

/// "token,label,pc1,pc2,..." rows for external plotting.
inline void write_pca_csv(std::ostream& out, const std::vector<std::string>& tokens, const std::vector<std::string>& labels, const PcaResult& pca) {
    out << "token,label";
    const std::size_t k = pca.components.size();
    for (std::size_t c = 0; c < k; ++c) {
        out << ",pc" << (c + 1);
    }
    out << '\n';
    for (std::size_t r = 0; r < pca.projections.size(); ++r) {
        out << tokens[r] << ',' << labels[r];
        for (double x : pca.projections[r]) {
            out << ',' << x;
        }
        out << '\n';
    }
}

}

#endif
