#include "cate/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "cate/error.hpp"
#include "cate/num.hpp"

namespace cate {

void TrainConfig::validate() const {
    if (dim < 2) throw Error("embedding dimension must be >= 2");
    if (window < 1) throw Error("window must be >= 1");
    if (negatives < 1) throw Error("negatives must be >= 1");
    if (max_iter < 1) throw Error("max_iter must be >= 1");
    if (!(initial_lr > 0.0)) throw Error("initial_lr must be positive");
    if (topic_weight < 0.0) throw Error("topic_weight must be >= 0");
    if (min_count < 1) throw Error("min_count must be >= 1");
    if (kappa_min < 0.0) throw Error("kappa_min must be >= 0");
    if (threads < 1) throw Error("threads must be >= 1");
}

EmbeddingState init_state(std::size_t vocab_size, std::size_t doc_count,
                          std::size_t n_categories, const TrainConfig& config) {
    config.validate();
    if (vocab_size == 0) throw Error("empty vocabulary");
    if (n_categories == 0) throw Error("at least one category required");

    EmbeddingState state;
    state.dim = config.dim;
    state.vocab_size = vocab_size;
    state.doc_count = doc_count;
    state.n_categories = n_categories;
    state.kappa_min = config.kappa_min;

    const auto p = static_cast<std::size_t>(config.dim);
    state.u.resize(vocab_size * p);
    state.v.resize(vocab_size * p);
    state.d.resize(doc_count * p);
    state.c.resize(n_categories * p);
    state.kappa.assign(vocab_size, 1.0);

    Rng rng(config.seed);
    auto fill = [&](std::vector<double>& block) {
        for (double& x : block) x = rng.gaussian();
        for (std::size_t r = 0; r * p < block.size(); ++r) {
            normalize({block.data() + r * p, p});
        }
    };
    fill(state.u);
    fill(state.v);
    fill(state.d);
    fill(state.c);
    return state;
}

namespace {

struct StepScratch {
    std::vector<double> grad_center;
    std::vector<double> dots;
    std::vector<double> gs;
};

thread_local StepScratch tls_scratch;

// Shared core of local_step and global_step. targets[0] is the positive
// sample. Gradients are all evaluated at the pre-update parameter values,
// then applied, then the touched rows are projected back to the sphere.
double pair_step(EmbeddingState& state, std::vector<double>& matrix,
                 WordId center, const std::uint32_t* targets,
                 std::size_t n_targets, double lr, const char* what) {
    const auto p = static_cast<std::size_t>(state.dim);
    StepScratch& s = tls_scratch;
    s.dots.resize(n_targets);
    s.gs.resize(n_targets);
    s.grad_center.assign(p, 0.0);

    double* u = state.u.data() + static_cast<std::size_t>(center) * p;
    const double kap = state.kappa[center];

    double loss = 0.0;
    for (std::size_t t = 0; t < n_targets; ++t) {
        const double* row = matrix.data() + static_cast<std::size_t>(targets[t]) * p;
        double dp = 0.0;
        for (std::size_t j = 0; j < p; ++j) dp += u[j] * row[j];
        if (!std::isfinite(dp)) {
            throw DivergenceError("numerical divergence (" + std::string(what) +
                                  " center=" + std::to_string(center) +
                                  " target=" + std::to_string(targets[t]) + ")");
        }
        s.dots[t] = dp;
        const double score = kap * dp;
        if (t == 0) {
            loss += softplus(-score);
            s.gs[t] = sigmoid(score) - 1.0;
        } else {
            loss += softplus(score);
            s.gs[t] = sigmoid(score);
        }
    }
    if (!std::isfinite(loss)) {
        throw DivergenceError("numerical divergence (" + std::string(what) +
                              " center=" + std::to_string(center) + ")");
    }

    double grad_kappa = 0.0;
    for (std::size_t t = 0; t < n_targets; ++t) grad_kappa += s.gs[t] * s.dots[t];

    // Accumulate the center gradient from the pre-update target rows.
    for (std::size_t t = 0; t < n_targets; ++t) {
        const double* row = matrix.data() + static_cast<std::size_t>(targets[t]) * p;
        const double coeff = kap * s.gs[t];
        for (std::size_t j = 0; j < p; ++j) s.grad_center[j] += coeff * row[j];
    }
    // Target rows move against the pre-update center vector.
    for (std::size_t t = 0; t < n_targets; ++t) {
        double* row = matrix.data() + static_cast<std::size_t>(targets[t]) * p;
        const double coeff = -lr * kap * s.gs[t];
        for (std::size_t j = 0; j < p; ++j) row[j] += coeff * u[j];
    }
    for (std::size_t j = 0; j < p; ++j) u[j] -= lr * s.grad_center[j];
    state.kappa[center] =
        std::max(state.kappa_min, kap - lr * grad_kappa);

    normalize({u, p});
    for (std::size_t t = 0; t < n_targets; ++t) {
        bool seen = false;
        for (std::size_t q = 0; q < t; ++q) {
            if (targets[q] == targets[t]) {
                seen = true;
                break;
            }
        }
        if (!seen) {
            normalize({matrix.data() + static_cast<std::size_t>(targets[t]) * p, p});
        }
    }
    return loss;
}

PairGradients pair_gradients(const EmbeddingState& state,
                             const std::vector<double>& matrix, WordId center,
                             const std::uint32_t* targets,
                             std::size_t n_targets) {
    const auto p = static_cast<std::size_t>(state.dim);
    const double* u = state.u.data() + static_cast<std::size_t>(center) * p;
    const double kap = state.kappa[center];

    PairGradients g;
    g.center.assign(p, 0.0);
    g.targets.resize(n_targets);
    for (std::size_t t = 0; t < n_targets; ++t) {
        const double* row = matrix.data() + static_cast<std::size_t>(targets[t]) * p;
        double dp = 0.0;
        for (std::size_t j = 0; j < p; ++j) dp += u[j] * row[j];
        const double score = kap * dp;
        double gt;
        if (t == 0) {
            g.loss += softplus(-score);
            gt = sigmoid(score) - 1.0;
        } else {
            g.loss += softplus(score);
            gt = sigmoid(score);
        }
        g.kappa += gt * dp;
        g.targets[t].assign(p, 0.0);
        for (std::size_t j = 0; j < p; ++j) {
            g.center[j] += kap * gt * row[j];
            g.targets[t][j] = kap * gt * u[j];
        }
    }
    return g;
}

}  // namespace

PairGradients local_gradients(const EmbeddingState& state, WordId center,
                              WordId context,
                              std::span<const WordId> negatives) {
    std::vector<std::uint32_t> targets;
    targets.reserve(negatives.size() + 1);
    targets.push_back(context);
    targets.insert(targets.end(), negatives.begin(), negatives.end());
    return pair_gradients(state, state.v, center, targets.data(), targets.size());
}

PairGradients global_gradients(const EmbeddingState& state, WordId word,
                               DocId doc, std::span<const DocId> negative_docs) {
    std::vector<std::uint32_t> targets;
    targets.reserve(negative_docs.size() + 1);
    targets.push_back(doc);
    targets.insert(targets.end(), negative_docs.begin(), negative_docs.end());
    return pair_gradients(state, state.d, word, targets.data(), targets.size());
}

double local_step(EmbeddingState& state, WordId center, WordId context,
                  std::span<const WordId> negatives, double lr) {
    static thread_local std::vector<std::uint32_t> targets;
    targets.clear();
    targets.push_back(context);
    targets.insert(targets.end(), negatives.begin(), negatives.end());
    return pair_step(state, state.v, center, targets.data(), targets.size(), lr,
                     "local step");
}

double global_step(EmbeddingState& state, WordId word, DocId doc,
                   std::span<const DocId> negative_docs, double lr) {
    static thread_local std::vector<std::uint32_t> targets;
    targets.clear();
    targets.push_back(doc);
    targets.insert(targets.end(), negative_docs.begin(), negative_docs.end());
    return pair_step(state, state.d, word, targets.data(), targets.size(), lr,
                     "global step");
}

std::vector<double> category_posterior(const EmbeddingState& state,
                                       WordId word) {
    std::vector<double> logits(state.n_categories);
    for (std::size_t j = 0; j < state.n_categories; ++j) {
        logits[j] = dot(state.c_row(j), state.u_row(word));
    }
    return softmax(logits);
}

TopicGradients topic_gradients(const EmbeddingState& state, WordId word,
                               std::size_t label) {
    const auto p = static_cast<std::size_t>(state.dim);
    const std::size_t n = state.n_categories;
    std::vector<double> logits(n);
    for (std::size_t j = 0; j < n; ++j) {
        logits[j] = dot(state.c_row(j), state.u_row(word));
    }
    double m = logits[0];
    for (double x : logits) m = std::max(m, x);
    double z = 0.0;
    for (double x : logits) z += std::exp(x - m);

    TopicGradients g;
    g.loss = m + std::log(z) - logits[label];
    g.word.assign(p, 0.0);
    g.categories.resize(n);
    const auto u = state.u_row(word);
    for (std::size_t j = 0; j < n; ++j) {
        const double pj = std::exp(logits[j] - m) / z;
        const double gj = pj - (j == label ? 1.0 : 0.0);
        g.categories[j].assign(p, 0.0);
        const auto cj = state.c_row(j);
        for (std::size_t i = 0; i < p; ++i) {
            g.word[i] += gj * cj[i];
            g.categories[j][i] = gj * u[i];
        }
    }
    return g;
}

double topic_step(EmbeddingState& state, WordId word, std::size_t label,
                  double lr, double topic_weight) {
    TopicGradients g = topic_gradients(state, word, label);
    if (!std::isfinite(g.loss)) {
        throw DivergenceError("numerical divergence (topic step word=" +
                              std::to_string(word) + ")");
    }
    if (topic_weight == 0.0) return g.loss;

    const double scale = lr * topic_weight;
    auto u = state.u_row(word);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= scale * g.word[i];
    for (std::size_t j = 0; j < state.n_categories; ++j) {
        auto cj = state.c_row(j);
        for (std::size_t i = 0; i < cj.size(); ++i) {
            cj[i] -= scale * g.categories[j][i];
        }
    }
    normalize(u);
    for (std::size_t j = 0; j < state.n_categories; ++j) normalize(state.c_row(j));
    return g.loss;
}

namespace {

// Per-token work shared by the sequential and parallel passes.
struct TokenTrainer {
    EmbeddingState& state;
    const EncodedCorpus& corpus;
    const SeedLabels& labels;
    const NegativeTable& table;
    const TrainConfig& config;
    LrSchedule& schedule;
    std::vector<WordId> negs;
    std::vector<DocId> negd;

    TokenTrainer(EmbeddingState& s, const EncodedCorpus& co,
                 const SeedLabels& l, const NegativeTable& t,
                 const TrainConfig& cf, LrSchedule& sch)
        : state(s), corpus(co), labels(l), table(t), config(cf), schedule(sch),
          negs(cf.negatives), negd(cf.negatives) {}

    void visit(DocId di, int pos, Rng& rng, PassStats& stats) {
        const auto& doc = corpus.documents[di];
        const int len = static_cast<int>(doc.size());
        const WordId center = doc[pos];
        const double lr = schedule.next();

        for (int j = -config.window; j <= config.window; ++j) {
            if (j == 0) continue;
            const int q = pos + j;
            if (q < 0 || q >= len) continue;
            const WordId context = doc[q];
            for (int t = 0; t < config.negatives; ++t) {
                negs[t] = table.sample(rng, context);
            }
            stats.local_loss += local_step(state, center, context, negs, lr);
            ++stats.local_steps;
        }
        if (corpus.doc_count >= 2) {
            for (int t = 0; t < config.negatives; ++t) {
                DocId nd;
                do {
                    nd = static_cast<DocId>(rng.below(corpus.doc_count));
                } while (nd == di);
                negd[t] = nd;
            }
            stats.global_loss += global_step(state, center, di, negd, lr);
            ++stats.global_steps;
        }
        if (config.topic_weight > 0.0 && center < labels.size() &&
            labels[center] != kNoCategory) {
            stats.topic_loss +=
                topic_step(state, center,
                           static_cast<std::size_t>(labels[center]), lr,
                           config.topic_weight);
            ++stats.topic_steps;
        }
    }
};

void finalize_means(PassStats& stats) {
    if (stats.local_steps > 0) stats.local_loss /= stats.local_steps;
    if (stats.global_steps > 0) stats.global_loss /= stats.global_steps;
    if (stats.topic_steps > 0) stats.topic_loss /= stats.topic_steps;
}

void renormalize_all(EmbeddingState& state) {
    const auto p = static_cast<std::size_t>(state.dim);
    auto sweep = [&](std::vector<double>& block) {
        for (std::size_t r = 0; r * p < block.size(); ++r) {
            normalize({block.data() + r * p, p});
        }
    };
    sweep(state.u);
    sweep(state.v);
    sweep(state.d);
    sweep(state.c);
    for (double& k : state.kappa) k = std::max(k, state.kappa_min);
}

}  // namespace

PassStats train_pass(EmbeddingState& state, const EncodedCorpus& corpus,
                     const SeedLabels& seed_labels, const NegativeTable& table,
                     const TrainConfig& config, LrSchedule& schedule,
                     Rng& rng) {
    config.validate();
    PassStats stats;
    TokenTrainer trainer(state, corpus, seed_labels, table, config, schedule);
    for (DocId di = 0; di < corpus.documents.size(); ++di) {
        const int len = static_cast<int>(corpus.documents[di].size());
        for (int i = 0; i < len; ++i) trainer.visit(di, i, rng, stats);
    }
    finalize_means(stats);
    return stats;
}

PassStats train_pass_parallel(EmbeddingState& state,
                              const EncodedCorpus& corpus,
                              const SeedLabels& seed_labels,
                              const NegativeTable& table,
                              const TrainConfig& config, LrSchedule& schedule,
                              std::uint64_t pass_index) {
    config.validate();
    const int n_threads =
        std::max(1, std::min<int>(config.threads,
                                  static_cast<int>(corpus.documents.size())));
    std::vector<PassStats> partials(n_threads);
    std::vector<std::thread> workers;
    workers.reserve(n_threads);

    const std::size_t n_docs = corpus.documents.size();
    for (int w = 0; w < n_threads; ++w) {
        workers.emplace_back([&, w]() {
            Rng rng(derive_seed(config.seed,
                                pass_index * 0x10001ULL +
                                    static_cast<std::uint64_t>(w)));
            TokenTrainer trainer(state, corpus, seed_labels, table, config,
                                 schedule);
            const std::size_t lo = n_docs * w / n_threads;
            const std::size_t hi = n_docs * (w + 1) / n_threads;
            for (std::size_t di = lo; di < hi; ++di) {
                const int len =
                    static_cast<int>(corpus.documents[di].size());
                for (int i = 0; i < len; ++i) {
                    trainer.visit(static_cast<DocId>(di), i, rng, partials[w]);
                }
            }
        });
    }
    for (auto& t : workers) t.join();

    PassStats stats;
    for (const auto& part : partials) {
        stats.local_loss += part.local_loss;
        stats.global_loss += part.global_loss;
        stats.topic_loss += part.topic_loss;
        stats.local_steps += part.local_steps;
        stats.global_steps += part.global_steps;
        stats.topic_steps += part.topic_steps;
    }
    finalize_means(stats);

    // Lock-free updates can leave stale norms; restore the invariant at the
    // pass boundary.
    renormalize_all(state);
    return stats;
}

namespace {

// log I_nu(x) by summing the ascending series in log space around its
// largest term; stable for x up to 1e4 and beyond.
double log_bessel_i(double nu, double x) {
    const double log_half_x = std::log(0.5 * x);
    auto log_term = [&](double m) {
        return (2.0 * m + nu) * log_half_x - std::lgamma(m + 1.0) -
               std::lgamma(m + nu + 1.0);
    };
    const double peak = 0.5 * (std::sqrt(nu * nu + x * x) - nu);
    const long m0 = peak > 1.0 ? static_cast<long>(peak) : 0;
    const double t0 = log_term(static_cast<double>(m0));
    double sum = 1.0;
    for (long m = m0 + 1;; ++m) {
        const double r = std::exp(log_term(static_cast<double>(m)) - t0);
        sum += r;
        if (r < 1e-24) break;
    }
    for (long m = m0 - 1; m >= 0; --m) {
        const double r = std::exp(log_term(static_cast<double>(m)) - t0);
        sum += r;
        if (r < 1e-24) break;
    }
    return t0 + std::log(sum);
}

}  // namespace

double vmf_log_normalizer(double kappa, int p) {
    if (p < 2) throw Error("vMF dimension must be >= 2");
    if (kappa < 0.0) throw Error("kappa must be >= 0");
    const double half_p = 0.5 * p;
    if (kappa == 0.0) {
        // Uniform density on S^{p-1}: Gamma(p/2) / (2 pi^{p/2}).
        return std::lgamma(half_p) - std::log(2.0) -
               half_p * std::log(3.14159265358979323846);
    }
    const double nu = half_p - 1.0;
    return nu * std::log(kappa) -
           half_p * std::log(2.0 * 3.14159265358979323846) -
           log_bessel_i(nu, kappa);
}

}  // namespace cate
