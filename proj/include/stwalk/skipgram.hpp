#ifndef STWALK_SKIPGRAM_HPP
#define STWALK_SKIPGRAM_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "walks.hpp"

namespace stwalk {

enum class Objective {
    negative_sampling,
    /// Exact softmax over the whole vocabulary. Desk-scale oracle only.
    full_softmax
};

struct TrainConfig {
    std::size_t dim = 64;
    /// Context positions on each side of the center token.
    std::size_t window = 5;
    std::size_t epochs = 1;
    std::size_t negatives = 5;
    double learning_rate = 0.025;
    std::uint64_t seed = 1;
    /// 1 is the deterministic reference mode; more workers update shared
    /// vectors without locking and are not reproducible.
    std::size_t threads = 1;
    Objective objective = Objective::negative_sampling;

    void validate() const {
        if (dim < 1) {
            throw ValidationError("embedding dimension must be at least 1");
        }
        if (window < 1) {
            throw ValidationError("context window must be at least 1");
        }
        if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
            throw ValidationError("learning rate must be positive");
        }
        if (epochs < 1) {
            throw ValidationError("epochs must be at least 1");
        }
    }
};

/**
 * Input and context vectors for every token in a vocabulary. The input
 * vector is the exported representation.
 */
class EmbeddingTable {
public:
    EmbeddingTable() = default;

    EmbeddingTable(std::vector<Token> tokens, std::size_t dim) :
        my_tokens(std::move(tokens)), my_dim(dim),
        my_input(my_tokens.size() * dim, 0.0), my_context(my_tokens.size() * dim, 0.0)
    {
        for (std::size_t i = 0; i < my_tokens.size(); ++i) {
            if (!my_index.emplace(my_tokens[i], i).second) {
                throw ValidationError("duplicate token in embedding vocabulary");
            }
        }
    }

    std::size_t dim() const {
        return my_dim;
    }

    std::size_t size() const {
        return my_tokens.size();
    }

    const std::vector<Token>& tokens() const {
        return my_tokens;
    }

    std::optional<std::size_t> find(const Token& tok) const {
        auto it = my_index.find(tok);
        if (it == my_index.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    std::size_t index(const Token& tok) const {
        auto found = find(tok);
        if (!found) {
            throw LookupError("token (" + std::to_string(tok.node) + ", " + std::to_string(tok.time) + ") is not in the embedding vocabulary");
        }
        return *found;
    }

    std::span<double> input(std::size_t i) {
        return { my_input.data() + i * my_dim, my_dim };
    }

    std::span<const double> input(std::size_t i) const {
        return { my_input.data() + i * my_dim, my_dim };
    }

    std::span<double> context(std::size_t i) {
        return { my_context.data() + i * my_dim, my_dim };
    }

    std::span<const double> context(std::size_t i) const {
        return { my_context.data() + i * my_dim, my_dim };
    }

    std::span<const double> input(const Token& tok) const {
        return input(index(tok));
    }

    std::span<const double> context(const Token& tok) const {
        return context(index(tok));
    }

    bool operator==(const EmbeddingTable& other) const {
        return my_tokens == other.my_tokens && my_dim == other.my_dim && my_input == other.my_input && my_context == other.my_context;
    }

private:
    std::vector<Token> my_tokens;
    std::unordered_map<Token, std::size_t, TokenHash> my_index;
    std::size_t my_dim = 0;
    std::vector<double> my_input;
    std::vector<double> my_context;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double sigmoid(double x) {
    if (x >= 0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

/// log(sigmoid(x)) without overflow for large |x|.
inline double log_sigmoid(double x) {
    if (x >= 0) {
        return -std::log1p(std::exp(-x));
    }
    return x - std::log1p(std::exp(x));
}

struct PairGradients {
    Vector center;
    Vector context;
    std::vector<Vector> negatives;
};

struct PairLoss {
    double loss = 0;
    PairGradients gradients;
};

/**
 * Negative-sampling loss for one (center, context) pair:
 * -log s(u.v_c) - sum_j log s(-u.v_j), with analytic gradients with respect
 * to the center input vector u, the context vector v_c and every negative v_j.
 */
inline PairLoss pair_loss_and_gradients(std::span<const double> center, std::span<const double> context,
                                        const std::vector<std::span<const double>>& negatives)
{
    const auto d = center.size();
    if (context.size() != d) {
        throw ValidationError("context vector has dimension " + std::to_string(context.size()) + ", expected " + std::to_string(d));
    }
    for (const auto& n : negatives) {
        if (n.size() != d) {
            throw ValidationError("negative vector has dimension " + std::to_string(n.size()) + ", expected " + std::to_string(d));
        }
    }

    PairLoss out;
    auto& grad = out.gradients;
    grad.center.assign(d, 0.0);
    grad.context.assign(d, 0.0);

    double pos = dot(center, context);
    out.loss = -log_sigmoid(pos);
    double gpos = sigmoid(pos) - 1.0;
    for (std::size_t i = 0; i < d; ++i) {
        grad.center[i] += gpos * context[i];
        grad.context[i] = gpos * center[i];
    }

    for (const auto& n : negatives) {
        double s = dot(center, n);
        out.loss -= log_sigmoid(-s);
        double gneg = sigmoid(s);
        Vector g(d);
        for (std::size_t i = 0; i < d; ++i) {
            grad.center[i] += gneg * n[i];
            g[i] = gneg * center[i];
        }
        grad.negatives.push_back(std::move(g));
    }
    return out;
}

namespace detail {

/// Plain or relaxed-atomic element access, so the hogwild path has no data race.
template<bool Shared_>
struct Cell {
    static double load(const double& x) {
        if constexpr (Shared_) {
            return std::atomic_ref<double>(const_cast<double&>(x)).load(std::memory_order_relaxed);
        } else {
            return x;
        }
    }

    static void add(double& x, double delta) {
        if constexpr (Shared_) {
            std::atomic_ref<double> ref(x);
            ref.store(ref.load(std::memory_order_relaxed) + delta, std::memory_order_relaxed);
        } else {
            x += delta;
        }
    }
};

struct Vocabulary {
    std::vector<Token> tokens;
    std::vector<std::uint64_t> counts;
    std::vector<std::vector<std::size_t>> sentences;
    std::uint64_t pairs_per_epoch = 0;
};

inline Vocabulary index_corpus(const WalkCorpus& corpus, std::size_t window) {
    Vocabulary vocab;
    std::unordered_map<Token, std::size_t, TokenHash> index;
    for (const auto& [tok, count] : corpus.vocabulary()) {
        index.emplace(tok, vocab.tokens.size());
        vocab.tokens.push_back(tok);
        vocab.counts.push_back(count);
    }
    vocab.sentences.reserve(corpus.size());
    for (const auto& walk : corpus.walks()) {
        std::vector<std::size_t> ids;
        ids.reserve(walk.size());
        for (const auto& tok : walk) {
            ids.push_back(index.at(tok));
        }
        const std::size_t len = ids.size();
        for (std::size_t n = 0; n < len; ++n) {
            std::size_t lo = n >= window ? n - window : 0;
            std::size_t hi = std::min(len - 1, n + window);
            vocab.pairs_per_epoch += hi - lo;
        }
        vocab.sentences.push_back(std::move(ids));
    }
    return vocab;
}

inline std::string describe_pair(const Token& center, const Token& context) {
    return "(" + std::to_string(center.node) + "@" + std::to_string(center.time) + ", " +
           std::to_string(context.node) + "@" + std::to_string(context.time) + ")";
}

template<bool Shared_>
class Trainer {
public:
    Trainer(EmbeddingTable& table, const Vocabulary& vocab, const TrainConfig& cfg, std::uint64_t total_pairs) :
        my_table(table), my_vocab(vocab), my_cfg(cfg), my_total(static_cast<double>(std::max<std::uint64_t>(total_pairs, 1))),
        my_grad(cfg.dim)
    {
        if (cfg.objective == Objective::negative_sampling) {
            std::vector<double> weights;
            weights.reserve(vocab.counts.size());
            for (auto c : vocab.counts) {
                weights.push_back(std::pow(static_cast<double>(c), 0.75));
            }
            my_noise = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
        } else {
            my_scores.resize(vocab.tokens.size());
        }
    }

    /// Returns the summed loss over the processed pairs.
    double run_sentence(const std::vector<std::size_t>& ids, std::uint64_t& processed, Rng& rng) {
        const std::size_t len = ids.size();
        const std::size_t w = my_cfg.window;
        double loss = 0;
        for (std::size_t n = 0; n < len; ++n) {
            std::size_t lo = n >= w ? n - w : 0;
            std::size_t hi = std::min(len - 1, n + w);
            for (std::size_t j = lo; j <= hi; ++j) {
                if (j == n) {
                    continue;
                }
                double progress = static_cast<double>(processed) / my_total;
                double lr = my_cfg.learning_rate * std::max(1e-4, 1.0 - (1.0 - 1e-4) * progress);
                if (my_cfg.objective == Objective::negative_sampling) {
                    loss += step_negative_sampling(ids[n], ids[j], lr, rng);
                } else {
                    loss += step_full_softmax(ids[n], ids[j], lr);
                }
                ++processed;
            }
        }
        return loss;
    }

private:
    using C = Cell<Shared_>;

    double dot_io(std::size_t center, std::size_t ctx) const {
        auto u = my_table.input(center);
        auto v = my_table.context(ctx);
        double s = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            s += C::load(u[i]) * C::load(v[i]);
        }
        return s;
    }

    void check_finite(double score, std::size_t center, std::size_t ctx) const {
        if (!std::isfinite(score)) {
            throw NumericError("non-finite gradient for pair " + describe_pair(my_vocab.tokens[center], my_vocab.tokens[ctx]));
        }
    }

    // Accumulates coef * context(target) into the center gradient, then moves
    // context(target) by -lr * coef * input(center).
    void apply_target(std::size_t center, std::size_t target, double coef, double lr) {
        auto u = my_table.input(center);
        auto v = my_table.context(target);
        for (std::size_t i = 0; i < u.size(); ++i) {
            my_grad[i] += coef * C::load(v[i]);
        }
        for (std::size_t i = 0; i < u.size(); ++i) {
            C::add(v[i], -lr * coef * C::load(u[i]));
        }
    }

    void apply_center(std::size_t center, double lr) {
        auto u = my_table.input(center);
        for (std::size_t i = 0; i < u.size(); ++i) {
            C::add(u[i], -lr * my_grad[i]);
        }
    }

    double step_negative_sampling(std::size_t center, std::size_t ctx, double lr, Rng& rng) {
        std::fill(my_grad.begin(), my_grad.end(), 0.0);
        double score = dot_io(center, ctx);
        check_finite(score, center, ctx);
        double loss = -log_sigmoid(score);
        apply_target(center, ctx, sigmoid(score) - 1.0, lr);
        for (std::size_t k = 0; k < my_cfg.negatives; ++k) {
            std::size_t neg = my_noise(rng);
            if (neg == ctx) {
                continue;
            }
            double s = dot_io(center, neg);
            check_finite(s, center, neg);
            loss -= log_sigmoid(-s);
            apply_target(center, neg, sigmoid(s), lr);
        }
        apply_center(center, lr);
        return loss;
    }

    double step_full_softmax(std::size_t center, std::size_t ctx, double lr) {
        std::fill(my_grad.begin(), my_grad.end(), 0.0);
        const std::size_t m = my_scores.size();
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < m; ++v) {
            my_scores[v] = dot_io(center, v);
            check_finite(my_scores[v], center, v);
            top = std::max(top, my_scores[v]);
        }
        double z = 0;
        for (std::size_t v = 0; v < m; ++v) {
            z += std::exp(my_scores[v] - top);
        }
        double loss = -(my_scores[ctx] - top - std::log(z));
        for (std::size_t v = 0; v < m; ++v) {
            double p = std::exp(my_scores[v] - top) / z;
            apply_target(center, v, p - (v == ctx ? 1.0 : 0.0), lr);
        }
        apply_center(center, lr);
        return loss;
    }

    EmbeddingTable& my_table;
    const Vocabulary& my_vocab;
    const TrainConfig& my_cfg;
    double my_total;
    std::discrete_distribution<std::size_t> my_noise;
    std::vector<double> my_scores;
    Vector my_grad;
};

}

/**
 * SGD over every (center, context) pair within `cfg.window` positions, for
 * `cfg.epochs` passes over the corpus. The learning rate decays linearly
 * to 1e-4 of its initial value over all pairs. Input vectors start uniform in
 * [-0.5/d, 0.5/d] and context vectors at zero.
 *
 * If `epoch_loss` is given, it receives the mean per-pair loss of each epoch.
 */
inline EmbeddingTable train(const WalkCorpus& corpus, const TrainConfig& cfg, Rng& rng, std::vector<double>* epoch_loss = nullptr) {
    cfg.validate();
    if (corpus.empty() || corpus.total_tokens() == 0) {
        throw ValidationError("cannot train on an empty corpus");
    }
    auto vocab = detail::index_corpus(corpus, cfg.window);
    EmbeddingTable table(vocab.tokens, cfg.dim);
    const double half = 0.5 / static_cast<double>(cfg.dim);
    std::uniform_real_distribution<double> init(-half, half);
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (auto& x : table.input(i)) {
            x = init(rng);
        }
    }

    const std::uint64_t total = vocab.pairs_per_epoch * cfg.epochs;
    if (epoch_loss) {
        epoch_loss->clear();
    }

    if (cfg.threads <= 1) {
        detail::Trainer<false> trainer(table, vocab, cfg, total);
        std::uint64_t processed = 0;
        for (std::size_t e = 0; e < cfg.epochs; ++e) {
            double loss = 0;
            for (const auto& sentence : vocab.sentences) {
                loss += trainer.run_sentence(sentence, processed, rng);
            }
            if (epoch_loss) {
                epoch_loss->push_back(vocab.pairs_per_epoch ? loss / static_cast<double>(vocab.pairs_per_epoch) : 0.0);
            }
        }
        return table;
    }

    // Hogwild: each worker owns a contiguous shard of sentences and its own
    // stream; the decay schedule is per worker, scaled to its share.
    const std::size_t workers = std::min(cfg.threads, vocab.sentences.size());
    std::vector<double> shard_loss(workers, 0.0);
    const std::uint64_t worker_seed = rng();
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        std::fill(shard_loss.begin(), shard_loss.end(), 0.0);
        parallel_for(workers, workers, [&](std::size_t w) {
            const std::size_t block = (vocab.sentences.size() + workers - 1) / workers;
            const std::size_t begin = w * block;
            const std::size_t end = std::min(vocab.sentences.size(), begin + block);
            detail::Trainer<true> trainer(table, vocab, cfg, total / workers);
            auto local = make_rng(derive_seed(worker_seed, e, w));
            std::uint64_t processed = (vocab.pairs_per_epoch / workers) * e;
            for (std::size_t s = begin; s < end; ++s) {
                shard_loss[w] += trainer.run_sentence(vocab.sentences[s], processed, local);
            }
        });
        if (epoch_loss) {
            double loss = std::accumulate(shard_loss.begin(), shard_loss.end(), 0.0);
            epoch_loss->push_back(vocab.pairs_per_epoch ? loss / static_cast<double>(vocab.pairs_per_epoch) : 0.0);
        }
    }
    return table;
}

inline EmbeddingTable train(const WalkCorpus& corpus, const TrainConfig& cfg, std::vector<double>* epoch_loss = nullptr) {
    auto rng = make_rng(cfg.seed);
    return train(corpus, cfg, rng, epoch_loss);
}

/**
 * Mean over all (center, context) pairs within `window` of
 * -log softmax(u_center . c_context) where the normalizer sums over
 * `normalization_set`. Intended for small vocabularies.
 */
inline double exact_softmax_loss(const EmbeddingTable& table, const WalkCorpus& corpus, std::size_t window,
                                 const std::vector<Token>& normalization_set)
{
    if (normalization_set.empty()) {
        throw ValidationError("normalization set is empty");
    }
    if (window < 1) {
        throw ValidationError("context window must be at least 1");
    }
    std::vector<std::size_t> norm;
    norm.reserve(normalization_set.size());
    for (const auto& tok : normalization_set) {
        norm.push_back(table.index(tok));
    }

    std::vector<double> scores(norm.size());
    double total = 0;
    std::uint64_t pairs = 0;
    for (const auto& walk : corpus.walks()) {
        const std::size_t len = walk.size();
        for (std::size_t n = 0; n < len; ++n) {
            auto u = table.input(table.index(walk[n]));
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < norm.size(); ++k) {
                scores[k] = dot(u, table.context(norm[k]));
                top = std::max(top, scores[k]);
            }
            double z = 0;
            for (double s : scores) {
                z += std::exp(s - top);
            }
            const double log_z = top + std::log(z);
            std::size_t lo = n >= window ? n - window : 0;
            std::size_t hi = std::min(len - 1, n + window);
            for (std::size_t j = lo; j <= hi; ++j) {
                if (j == n) {
                    continue;
                }
                total += log_z - dot(u, table.context(table.index(walk[j])));
                ++pairs;
            }
        }
    }
    if (pairs == 0) {
        throw ValidationError("corpus has no (center, context) pairs");
    }
    return total / static_cast<double>(pairs);
}

}

#endif
