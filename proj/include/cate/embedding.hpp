#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "cate/corpus.hpp"
#include "cate/rng.hpp"

namespace cate {

inline constexpr std::int32_t kNoCategory = -1;

// Per-word category labels derived from the current seed sets; kNoCategory
// for unsupervised words.
using SeedLabels = std::vector<std::int32_t>;

struct TrainConfig {
    int dim = 100;                  // embedding dimensionality p
    int window = 5;                 // local context window h
    int negatives = 5;              // negative samples k
    int max_iter = 10;              // full passes over the corpus
    double initial_lr = 0.025;
    double topic_weight = 1.0;      // weight on the category supervision term
    std::int64_t min_count = 5;
    std::int64_t min_count_retrieval = 5;
    double sample_power = 0.75;
    double kappa_min = 1e-3;
    std::uint64_t seed = 1;
    bool deterministic = true;
    int threads = 1;

    void validate() const;
};

// All model parameters. Every row of u, v, d, c stays unit-norm after each
// completed update; kappa stays >= kappa_min.
struct EmbeddingState {
    int dim = 0;
    std::size_t vocab_size = 0;
    std::size_t doc_count = 0;
    std::size_t n_categories = 0;
    std::vector<double> u;      // |V| x p input word vectors
    std::vector<double> v;      // |V| x p output (context) word vectors
    std::vector<double> d;      // |D| x p document vectors
    std::vector<double> c;      // n x p category vectors
    std::vector<double> kappa;  // |V| distributional specificity
    double kappa_min = 1e-3;

    std::span<double> u_row(WordId w) {
        return {u.data() + static_cast<std::size_t>(w) * dim,
                static_cast<std::size_t>(dim)};
    }
    std::span<const double> u_row(WordId w) const {
        return {u.data() + static_cast<std::size_t>(w) * dim,
                static_cast<std::size_t>(dim)};
    }
    std::span<double> v_row(WordId w) {
        return {v.data() + static_cast<std::size_t>(w) * dim,
                static_cast<std::size_t>(dim)};
    }
    std::span<const double> v_row(WordId w) const {
        return {v.data() + static_cast<std::size_t>(w) * dim,
                static_cast<std::size_t>(dim)};
    }
    std::span<double> d_row(DocId doc) {
        return {d.data() + static_cast<std::size_t>(doc) * dim,
                static_cast<std::size_t>(dim)};
    }
    std::span<const double> d_row(DocId doc) const {
        return {d.data() + static_cast<std::size_t>(doc) * dim,
                static_cast<std::size_t>(dim)};
    }
    std::span<double> c_row(std::size_t i) {
        return {c.data() + i * dim, static_cast<std::size_t>(dim)};
    }
    std::span<const double> c_row(std::size_t i) const {
        return {c.data() + i * dim, static_cast<std::size_t>(dim)};
    }
};

// Rows drawn from the seeded RNG and normalized; kappa starts at 1 for every
// word.
EmbeddingState init_state(std::size_t vocab_size, std::size_t doc_count,
                          std::size_t n_categories, const TrainConfig& config);

// Analytic gradients of one negative-sampling step, evaluated before any
// update is applied. targets[0] is the positive; the rest are negatives.
struct PairGradients {
    double loss = 0.0;
    std::vector<double> center;                // d loss / d u_center
    std::vector<std::vector<double>> targets;  // d loss / d (v or d) row
    double kappa = 0.0;                        // d loss / d kappa_center
};

PairGradients local_gradients(const EmbeddingState& state, WordId center,
                              WordId context, std::span<const WordId> negatives);
PairGradients global_gradients(const EmbeddingState& state, WordId word,
                               DocId doc, std::span<const DocId> negative_docs);

// One SGD step on the negative-sampling surrogate of -log p(context|center):
// score s(x) = kappa_center * (u_center . v_x). Updates u_center, v_context,
// each v_neg and kappa_center, then renormalizes the touched rows. Returns
// the loss contribution.
double local_step(EmbeddingState& state, WordId center, WordId context,
                  std::span<const WordId> negatives, double lr);

// Same surrogate with document rows in place of output word rows.
double global_step(EmbeddingState& state, WordId word, DocId doc,
                   std::span<const DocId> negative_docs, double lr);

// Full softmax over c_j . u_w; entries positive, sum to 1.
std::vector<double> category_posterior(const EmbeddingState& state, WordId word);

struct TopicGradients {
    double loss = 0.0;                            // -log p(label|word)
    std::vector<double> word;                     // d loss / d u_word
    std::vector<std::vector<double>> categories;  // d loss / d c_j, all j
};

TopicGradients topic_gradients(const EmbeddingState& state, WordId word,
                               std::size_t label);

// Cross-entropy step pulling p(label|word) toward 1; the full-softmax
// gradient is applied to u_word and every c_j, scaled by topic_weight * lr.
// Returns the unweighted cross-entropy loss.
double topic_step(EmbeddingState& state, WordId word, std::size_t label,
                  double lr, double topic_weight);

// Linear decay from initial_lr to initial_lr * floor_fraction over the total
// planned tokens of the whole run. Shared across passes (and workers).
struct LrSchedule {
    double initial_lr = 0.025;
    double floor_fraction = 0.01;
    std::int64_t total_tokens = 1;
    std::atomic<std::int64_t> processed{0};

    LrSchedule(double lr0, std::int64_t total)
        : initial_lr(lr0), total_tokens(total < 1 ? 1 : total) {}

    // Learning rate for the next token; advances the shared counter.
    double next() {
        const std::int64_t t =
            processed.fetch_add(1, std::memory_order_relaxed);
        return at(t);
    }
    double at(std::int64_t t) const {
        const double frac =
            static_cast<double>(t) / static_cast<double>(total_tokens);
        const double lr = initial_lr * (1.0 - (1.0 - floor_fraction) * frac);
        return lr < initial_lr * floor_fraction ? initial_lr * floor_fraction
                                                : lr;
    }
};

struct PassStats {
    double local_loss = 0.0;   // mean per local step
    double global_loss = 0.0;  // mean per global step
    double topic_loss = 0.0;   // mean per topic step
    std::int64_t local_steps = 0;
    std::int64_t global_steps = 0;
    std::int64_t topic_steps = 0;
};

// One full pass over the corpus: for each center token, a local step against
// every window context, one global step against its document (skipped when
// the corpus has a single document), and a topic step whenever the token is
// a seed word. Single worker; bitwise deterministic for a fixed rng state.
PassStats train_pass(EmbeddingState& state, const EncodedCorpus& corpus,
                     const SeedLabels& seed_labels, const NegativeTable& table,
                     const TrainConfig& config, LrSchedule& schedule, Rng& rng);

// Lock-free variant: workers share the parameter arrays without
// synchronization, so results are nondeterministic and unit norms are only
// restored by the full renormalization sweep at the end of the pass.
PassStats train_pass_parallel(EmbeddingState& state,
                              const EncodedCorpus& corpus,
                              const SeedLabels& seed_labels,
                              const NegativeTable& table,
                              const TrainConfig& config, LrSchedule& schedule,
                              std::uint64_t pass_index);

// log c_p(kappa) of the p-variate von Mises-Fisher normalization constant,
// finite for kappa up to 1e4 and beyond. kappa = 0 gives the uniform-sphere
// constant.
double vmf_log_normalizer(double kappa, int p);

}  // namespace cate
