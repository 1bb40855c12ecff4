#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"

#include "cate/corpus.hpp"
#include "cate/embedding.hpp"
#include "cate/error.hpp"
#include "cate/num.hpp"
#include "cate/rng.hpp"

using namespace cate;

namespace {

constexpr double kPi = 3.14159265358979323846;

EmbeddingState random_state(std::size_t vocab, std::size_t docs, std::size_t n,
                            int p, std::uint64_t seed) {
    TrainConfig config;
    config.dim = p;
    config.seed = seed;
    EmbeddingState state = init_state(vocab, docs, n, config);
    Rng rng(seed + 17);
    for (auto& k : state.kappa) k = 0.2 + 2.8 * rng.uniform();
    return state;
}

// Reference losses written straight from the definitions, independent of the
// library's gradient path.
double ref_pos(double score) { return std::log1p(std::exp(-score)); }
double ref_neg(double score) { return std::log1p(std::exp(score)); }

double ref_pair_loss(const EmbeddingState& state,
                     const std::vector<double>& matrix, WordId center,
                     const std::vector<std::uint32_t>& targets) {
    const auto p = static_cast<std::size_t>(state.dim);
    const double* u = state.u.data() + center * p;
    const double kap = state.kappa[center];
    double loss = 0.0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const double* row = matrix.data() + targets[t] * p;
        double dp = 0.0;
        for (std::size_t j = 0; j < p; ++j) dp += u[j] * row[j];
        loss += t == 0 ? ref_pos(kap * dp) : ref_neg(kap * dp);
    }
    return loss;
}

double ref_topic_loss(const EmbeddingState& state, WordId word,
                      std::size_t label) {
    const auto p = static_cast<std::size_t>(state.dim);
    double z = 0.0;
    for (std::size_t j = 0; j < state.n_categories; ++j) {
        double dp = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            dp += state.c[j * p + i] * state.u[word * p + i];
        }
        z += std::exp(dp);
    }
    double dl = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        dl += state.c[label * p + i] * state.u[word * p + i];
    }
    return std::log(z) - dl;
}

// Central finite difference of `loss` w.r.t. the parameter picked out by
// `param` on a copy of the state, before any renormalization.
double fd(const EmbeddingState& base,
          const std::function<double&(EmbeddingState&)>& param,
          const std::function<double(const EmbeddingState&)>& loss,
          double eps = 1e-5) {
    EmbeddingState hi = base;
    param(hi) += eps;
    EmbeddingState lo = base;
    param(lo) -= eps;
    return (loss(hi) - loss(lo)) / (2.0 * eps);
}

double rel_error(const std::vector<double>& analytic,
                 const std::vector<double>& numeric) {
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
        ref += numeric[i] * numeric[i];
    }
    return std::sqrt(diff) / std::max(std::sqrt(ref), 1e-8);
}

}  // namespace

TEST_CASE("init_state rows are unit norm and kappa starts at one") {
    TrainConfig config;
    config.dim = 16;
    config.seed = 42;
    const auto state = init_state(30, 8, 3, config);
    const auto check_rows = [&](const std::vector<double>& block) {
        for (std::size_t r = 0; r * 16 < block.size(); ++r) {
            CHECK(norm({block.data() + r * 16, 16}) ==
                  doctest::Approx(1.0).epsilon(1e-6));
        }
    };
    check_rows(state.u);
    check_rows(state.v);
    check_rows(state.d);
    check_rows(state.c);
    for (double k : state.kappa) CHECK(k == 1.0);
}

TEST_CASE("init_state is bitwise deterministic for a fixed seed") {
    TrainConfig config;
    config.dim = 12;
    config.seed = 9001;
    const auto a = init_state(20, 5, 2, config);
    const auto b = init_state(20, 5, 2, config);
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    CHECK(a.d == b.d);
    CHECK(a.c == b.c);
    CHECK(a.kappa == b.kappa);
}

TEST_CASE("init_state rejects degenerate dimensions") {
    TrainConfig config;
    config.dim = 1;
    CHECK_THROWS_AS(init_state(10, 2, 2, config), Error);
}

TEST_CASE("zero kappa kills vector gradients but not the kappa gradient") {
    auto state = random_state(10, 4, 2, 8, 3);
    state.kappa[2] = 0.0;
    const std::vector<WordId> negs{5, 7, 9};
    const auto g = local_gradients(state, 2, 4, negs);
    for (double x : g.center) CHECK(x == 0.0);
    for (const auto& row : g.targets) {
        for (double x : row) CHECK(x == 0.0);
    }
    CHECK(g.kappa != 0.0);
}

TEST_CASE("analytic gradients match finite differences") {
    const int p = 7;
    const std::size_t V = 12, D = 9, N = 4;
    Rng pick(2024);

    for (int trial = 0; trial < 100; ++trial) {
        const auto state = random_state(V, D, N, p, 1000 + trial);
        const WordId center = static_cast<WordId>(pick.below(V));
        WordId context;
        do {
            context = static_cast<WordId>(pick.below(V));
        } while (context == center);
        std::vector<WordId> negs;
        while (negs.size() < 3) {
            const WordId w = static_cast<WordId>(pick.below(V));
            if (w == context) continue;
            bool dup = false;
            for (WordId n : negs) dup |= n == w;
            if (!dup) negs.push_back(w);
        }

        {
            // local step
            std::vector<std::uint32_t> targets{context};
            targets.insert(targets.end(), negs.begin(), negs.end());
            const auto loss = [&](const EmbeddingState& s) {
                return ref_pair_loss(s, s.v, center, targets);
            };
            const auto g = local_gradients(state, center, context, negs);
            std::vector<double> analytic, numeric;
            for (int j = 0; j < p; ++j) {
                analytic.push_back(g.center[j]);
                numeric.push_back(fd(
                    state,
                    [&](EmbeddingState& s) -> double& {
                        return s.u[center * p + j];
                    },
                    loss));
            }
            for (std::size_t t = 0; t < targets.size(); ++t) {
                for (int j = 0; j < p; ++j) {
                    analytic.push_back(g.targets[t][j]);
                    numeric.push_back(fd(
                        state,
                        [&](EmbeddingState& s) -> double& {
                            return s.v[targets[t] * p + j];
                        },
                        loss));
                }
            }
            analytic.push_back(g.kappa);
            numeric.push_back(fd(
                state,
                [&](EmbeddingState& s) -> double& { return s.kappa[center]; },
                loss));
            CHECK(rel_error(analytic, numeric) < 1e-4);
        }
        {
            // global step
            const DocId doc = static_cast<DocId>(pick.below(D));
            std::vector<DocId> negd;
            while (negd.size() < 3) {
                const DocId x = static_cast<DocId>(pick.below(D));
                if (x == doc) continue;
                bool dup = false;
                for (DocId n : negd) dup |= n == x;
                if (!dup) negd.push_back(x);
            }
            std::vector<std::uint32_t> targets{doc};
            targets.insert(targets.end(), negd.begin(), negd.end());
            const auto loss = [&](const EmbeddingState& s) {
                return ref_pair_loss(s, s.d, center, targets);
            };
            const auto g = global_gradients(state, center, doc, negd);
            std::vector<double> analytic, numeric;
            for (int j = 0; j < p; ++j) {
                analytic.push_back(g.center[j]);
                numeric.push_back(fd(
                    state,
                    [&](EmbeddingState& s) -> double& {
                        return s.u[center * p + j];
                    },
                    loss));
            }
            for (std::size_t t = 0; t < targets.size(); ++t) {
                for (int j = 0; j < p; ++j) {
                    analytic.push_back(g.targets[t][j]);
                    numeric.push_back(fd(
                        state,
                        [&](EmbeddingState& s) -> double& {
                            return s.d[targets[t] * p + j];
                        },
                        loss));
                }
            }
            analytic.push_back(g.kappa);
            numeric.push_back(fd(
                state,
                [&](EmbeddingState& s) -> double& { return s.kappa[center]; },
                loss));
            CHECK(rel_error(analytic, numeric) < 1e-4);
        }
        {
            // topic step
            const std::size_t label = pick.below(N);
            const auto loss = [&](const EmbeddingState& s) {
                return ref_topic_loss(s, center, label);
            };
            const auto g = topic_gradients(state, center, label);
            std::vector<double> analytic, numeric;
            for (int j = 0; j < p; ++j) {
                analytic.push_back(g.word[j]);
                numeric.push_back(fd(
                    state,
                    [&](EmbeddingState& s) -> double& {
                        return s.u[center * p + j];
                    },
                    loss));
            }
            for (std::size_t cat = 0; cat < N; ++cat) {
                for (int j = 0; j < p; ++j) {
                    analytic.push_back(g.categories[cat][j]);
                    numeric.push_back(fd(
                        state,
                        [&](EmbeddingState& s) -> double& {
                            return s.c[cat * p + j];
                        },
                        loss));
                }
            }
            CHECK(rel_error(analytic, numeric) < 1e-4);
        }
    }
}

TEST_CASE("repeated local steps decrease the loss at small learning rate") {
    auto state = random_state(10, 4, 2, 8, 77);
    const std::vector<WordId> negs{5, 7, 9};
    double prev = local_step(state, 2, 4, negs, 1e-3);
    for (int i = 0; i < 300; ++i) {
        const double cur = local_step(state, 2, 4, negs, 1e-3);
        CHECK(cur <= prev + 1e-9);
        prev = cur;
    }
}

TEST_CASE("steps keep every touched row on the unit sphere") {
    auto state = random_state(10, 6, 3, 8, 5);
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        const WordId center = static_cast<WordId>(rng.below(10));
        WordId context = static_cast<WordId>(rng.below(10));
        if (context == center) context = (context + 1) % 10;
        std::vector<WordId> negs;
        for (int t = 0; t < 3; ++t) {
            WordId w = static_cast<WordId>(rng.below(10));
            if (w == context) w = (w + 1) % 10;
            negs.push_back(w);
        }
        local_step(state, center, context, negs, 0.1);
        const DocId doc = static_cast<DocId>(rng.below(6));
        std::vector<DocId> negd;
        for (int t = 0; t < 3; ++t) {
            DocId x = static_cast<DocId>(rng.below(6));
            if (x == doc) x = (x + 1) % 6;
            negd.push_back(x);
        }
        global_step(state, center, doc, negd, 0.1);
        topic_step(state, center, rng.below(3), 0.1, 1.0);
    }
    const auto p = static_cast<std::size_t>(state.dim);
    const auto check_rows = [&](const std::vector<double>& block) {
        for (std::size_t r = 0; r * p < block.size(); ++r) {
            CHECK(std::abs(norm({block.data() + r * p, p}) - 1.0) < 1e-6);
        }
    };
    check_rows(state.u);
    check_rows(state.v);
    check_rows(state.d);
    check_rows(state.c);
    for (double k : state.kappa) CHECK(k >= state.kappa_min);
}

TEST_CASE("saturated positive pair yields a near-zero positive-term gradient") {
    auto state = random_state(6, 4, 2, 8, 21);
    const auto u = state.u_row(1);
    auto d0 = state.d_row(0);
    for (std::size_t j = 0; j < u.size(); ++j) d0[j] = u[j];
    state.kappa[1] = 50.0;
    const std::vector<DocId> negd{2};
    const auto g = global_gradients(state, 1, 0, negd);
    CHECK(norm({g.targets[0].data(), g.targets[0].size()}) < 1e-12);
}

TEST_CASE("orthogonal negative doc gradient has magnitude kappa/2") {
    auto state = random_state(6, 4, 2, 8, 22);
    auto u = state.u_row(1);
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = j == 0 ? 1.0 : 0.0;
    auto neg = state.d_row(3);
    for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = j == 1 ? 1.0 : 0.0;
    state.kappa[1] = 1.7;

    const std::vector<DocId> negd{3};
    const auto g = global_gradients(state, 1, 0, negd);
    // sigmoid(0) = 1/2, so the gradient is (kappa/2) * u.
    CHECK(norm({g.targets[1].data(), g.targets[1].size()}) ==
          doctest::Approx(1.7 / 2.0).epsilon(1e-12));
    CHECK(g.targets[1][0] == doctest::Approx(1.7 / 2.0).epsilon(1e-12));
}

TEST_CASE("category_posterior matches the analytic two-category value") {
    auto state = random_state(4, 2, 2, 6, 31);
    auto c0 = state.c_row(0);
    auto c1 = state.c_row(1);
    auto u = state.u_row(0);
    for (std::size_t j = 0; j < u.size(); ++j) {
        u[j] = j == 0 ? 1.0 : 0.0;
        c0[j] = u[j];
        c1[j] = -u[j];
    }
    const auto post = category_posterior(state, 0);
    CHECK(std::abs(post[0] - 1.0 / (1.0 + std::exp(-2.0))) < 1e-12);
    CHECK(std::abs(post[0] + post[1] - 1.0) < 1e-12);
}

TEST_CASE("category_posterior is uniform for equidistant categories") {
    auto state = random_state(4, 2, 3, 6, 32);
    auto u = state.u_row(1);
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = j == 5 ? 1.0 : 0.0;
    for (std::size_t cat = 0; cat < 3; ++cat) {
        auto c = state.c_row(cat);
        for (std::size_t j = 0; j < c.size(); ++j) {
            c[j] = j == cat ? 1.0 : 0.0;  // all orthogonal to u
        }
    }
    const auto post = category_posterior(state, 1);
    for (double x : post) CHECK(std::abs(x - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("category_posterior agrees with a direct exp/sum computation") {
    for (int trial = 0; trial < 20; ++trial) {
        const auto state = random_state(8, 3, 5, 9, 100 + trial);
        for (WordId w = 0; w < 8; ++w) {
            const auto post = category_posterior(state, w);
            double z = 0.0;
            std::vector<double> expected(5);
            for (std::size_t j = 0; j < 5; ++j) {
                expected[j] = std::exp(dot(state.c_row(j), state.u_row(w)));
                z += expected[j];
            }
            double sum = 0.0;
            for (std::size_t j = 0; j < 5; ++j) {
                CHECK(std::abs(post[j] - expected[j] / z) < 1e-12);
                CHECK(post[j] > 0.0);
                sum += post[j];
            }
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("softmax is invariant to a constant logit shift") {
    Rng rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> logits(6);
        for (double& x : logits) x = 4.0 * rng.uniform() - 2.0;
        const auto base = softmax(logits);
        const double shift = 10.0 * rng.uniform() - 5.0;
        for (double& x : logits) x += shift;
        const auto shifted = softmax(logits);
        for (std::size_t j = 0; j < base.size(); ++j) {
            CHECK(std::abs(base[j] - shifted[j]) < 1e-12);
        }
    }
}

TEST_CASE("topic loss is zero at the target") {
    // With a single category the posterior is exactly one.
    auto state = random_state(4, 2, 1, 6, 40);
    const auto g = topic_gradients(state, 0, 0);
    CHECK(g.loss == 0.0);
    for (double x : g.word) CHECK(x == 0.0);
    for (double x : g.categories[0]) CHECK(x == 0.0);
}

TEST_CASE("topic loss at an antipodal pair is log(1 + exp(-2))") {
    auto state = random_state(4, 2, 2, 6, 41);
    auto c0 = state.c_row(0);
    auto c1 = state.c_row(1);
    auto u = state.u_row(2);
    for (std::size_t j = 0; j < u.size(); ++j) {
        u[j] = j == 0 ? 1.0 : 0.0;
        c0[j] = u[j];
        c1[j] = -u[j];
    }
    const auto g = topic_gradients(state, 2, 0);
    CHECK(std::abs(g.loss - std::log(1.0 + std::exp(-2.0))) < 1e-12);
}

TEST_CASE("train_pass does window-truncated local steps only") {
    TokenDocs docs{{"t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8"}};
    const auto vocab = build_vocabulary(docs, 1);
    const auto corpus = encode(docs, vocab);
    const NegativeTable table(vocab, 0.75);

    TrainConfig config;
    config.dim = 6;
    config.window = 3;
    config.negatives = 2;
    config.topic_weight = 0.0;
    config.seed = 3;
    auto state = init_state(vocab.size(), corpus.doc_count, 2, config);
    LrSchedule schedule(config.initial_lr, corpus.total_tokens);
    Rng rng(config.seed);
    const SeedLabels labels(vocab.size(), kNoCategory);
    const auto stats =
        train_pass(state, corpus, labels, table, config, schedule, rng);

    std::int64_t expected = 0;
    const int len = 9, h = 3;
    for (int i = 0; i < len; ++i) {
        expected += std::min(h, i) + std::min(h, len - 1 - i);
    }
    CHECK(stats.local_steps == expected);
    CHECK(stats.global_steps == 0);  // single document: no negatives exist
    CHECK(stats.topic_steps == 0);
}

TEST_CASE("category vectors stay bitwise unchanged without topic supervision") {
    TokenDocs docs{{"a", "b", "c", "a"}, {"b", "c", "d"}, {"d", "a", "c"}};
    const auto vocab = build_vocabulary(docs, 1);
    const auto corpus = encode(docs, vocab);
    const NegativeTable table(vocab, 0.75);

    TrainConfig config;
    config.dim = 6;
    config.window = 2;
    config.negatives = 2;
    config.topic_weight = 0.0;
    config.seed = 8;
    auto state = init_state(vocab.size(), corpus.doc_count, 2, config);
    const auto before = state.c;

    LrSchedule schedule(config.initial_lr, corpus.total_tokens);
    Rng rng(config.seed);
    SeedLabels labels(vocab.size(), kNoCategory);
    labels[0] = 0;  // seed membership present, but weight is zero
    train_pass(state, corpus, labels, table, config, schedule, rng);
    CHECK(state.c == before);
}

TEST_CASE("training separates planted co-occurrence clusters") {
    Rng gen(123);
    TokenDocs docs;
    for (int i = 0; i < 240; ++i) {
        const int block = i % 2;
        std::vector<std::string> doc;
        for (int j = 0; j < 8; ++j) {
            doc.push_back("b" + std::to_string(block) + "w" +
                          std::to_string(gen.below(10)));
        }
        docs.push_back(std::move(doc));
    }
    const auto vocab = build_vocabulary(docs, 1);
    const auto corpus = encode(docs, vocab);
    const NegativeTable table(vocab, 0.75);

    TrainConfig config;
    config.dim = 16;
    config.window = 4;
    config.negatives = 4;
    config.max_iter = 5;
    config.topic_weight = 0.0;
    config.seed = 6;
    auto state = init_state(vocab.size(), corpus.doc_count, 2, config);
    LrSchedule schedule(config.initial_lr,
                        corpus.total_tokens * config.max_iter);
    Rng rng(config.seed);
    const SeedLabels labels(vocab.size(), kNoCategory);
    for (int pass = 0; pass < config.max_iter; ++pass) {
        train_pass(state, corpus, labels, table, config, schedule, rng);
    }

    double intra = 0.0, inter = 0.0;
    std::int64_t n_intra = 0, n_inter = 0;
    for (std::size_t a = 0; a < vocab.size(); ++a) {
        for (std::size_t b = a + 1; b < vocab.size(); ++b) {
            const double cos = dot(state.u_row(static_cast<WordId>(a)),
                                   state.u_row(static_cast<WordId>(b)));
            const bool same = vocab.words[a][1] == vocab.words[b][1];
            (same ? intra : inter) += cos;
            (same ? n_intra : n_inter) += 1;
        }
    }
    CHECK(intra / n_intra > inter / n_inter);

    // Sphere invariant after a full run.
    const auto p = static_cast<std::size_t>(state.dim);
    for (std::size_t r = 0; r < vocab.size(); ++r) {
        CHECK(std::abs(norm({state.u.data() + r * p, p}) - 1.0) < 1e-6);
    }
}

TEST_CASE("single-threaded training is bitwise deterministic") {
    TokenDocs docs;
    Rng gen(77);
    for (int i = 0; i < 40; ++i) {
        std::vector<std::string> doc;
        for (int j = 0; j < 6; ++j) {
            doc.push_back("w" + std::to_string(gen.below(12)));
        }
        docs.push_back(std::move(doc));
    }
    const auto vocab = build_vocabulary(docs, 1);
    const auto corpus = encode(docs, vocab);
    const NegativeTable table(vocab, 0.75);

    TrainConfig config;
    config.dim = 8;
    config.window = 3;
    config.negatives = 3;
    config.seed = 4;
    SeedLabels labels(vocab.size(), kNoCategory);
    labels[0] = 0;
    labels[1] = 1;

    auto run = [&]() {
        auto state = init_state(vocab.size(), corpus.doc_count, 2, config);
        LrSchedule schedule(config.initial_lr, corpus.total_tokens * 2);
        Rng rng(config.seed);
        train_pass(state, corpus, labels, table, config, schedule, rng);
        train_pass(state, corpus, labels, table, config, schedule, rng);
        return state;
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    CHECK(a.d == b.d);
    CHECK(a.c == b.c);
    CHECK(a.kappa == b.kappa);
}

TEST_CASE("parallel pass restores invariants at the pass boundary") {
    Rng gen(321);
    TokenDocs docs;
    for (int i = 0; i < 300; ++i) {
        const int block = i % 2;
        std::vector<std::string> doc;
        for (int j = 0; j < 8; ++j) {
            doc.push_back("b" + std::to_string(block) + "w" +
                          std::to_string(gen.below(10)));
        }
        docs.push_back(std::move(doc));
    }
    const auto vocab = build_vocabulary(docs, 1);
    const auto corpus = encode(docs, vocab);
    const NegativeTable table(vocab, 0.75);

    TrainConfig config;
    config.dim = 16;
    config.window = 4;
    config.negatives = 4;
    config.max_iter = 4;
    config.topic_weight = 0.0;
    config.seed = 14;
    config.deterministic = false;
    config.threads = 2;
    auto state = init_state(vocab.size(), corpus.doc_count, 2, config);
    LrSchedule schedule(config.initial_lr,
                        corpus.total_tokens * config.max_iter);
    const SeedLabels labels(vocab.size(), kNoCategory);
    PassStats stats;
    for (int pass = 0; pass < config.max_iter; ++pass) {
        stats = train_pass_parallel(state, corpus, labels, table, config,
                                    schedule, static_cast<std::uint64_t>(pass));
    }
    CHECK(stats.local_steps > 0);
    CHECK(stats.global_steps > 0);

    const auto p = static_cast<std::size_t>(state.dim);
    const auto check_rows = [&](const std::vector<double>& block) {
        for (std::size_t r = 0; r * p < block.size(); ++r) {
            CHECK(std::abs(norm({block.data() + r * p, p}) - 1.0) < 1e-6);
        }
    };
    check_rows(state.u);
    check_rows(state.v);
    check_rows(state.d);
    check_rows(state.c);
    for (double k : state.kappa) CHECK(k >= state.kappa_min);

    // The lock-free pass still has to learn the planted structure.
    double intra = 0.0, inter = 0.0;
    std::int64_t n_intra = 0, n_inter = 0;
    for (std::size_t a = 0; a < vocab.size(); ++a) {
        for (std::size_t b = a + 1; b < vocab.size(); ++b) {
            const double cos = dot(state.u_row(static_cast<WordId>(a)),
                                   state.u_row(static_cast<WordId>(b)));
            const bool same = vocab.words[a][1] == vocab.words[b][1];
            (same ? intra : inter) += cos;
            (same ? n_intra : n_inter) += 1;
        }
    }
    CHECK(intra / n_intra > inter / n_inter);
}

TEST_CASE("non-finite state raises a divergence error") {
    auto state = random_state(6, 3, 2, 8, 50);
    state.u[2 * 8 + 1] = std::nan("");
    const std::vector<WordId> negs{4, 5};
    CHECK_THROWS_AS(local_step(state, 2, 3, negs, 0.01), DivergenceError);
}

TEST_CASE("words with concentrated contexts learn larger kappa") {
    // Word A always appears with 3 fixed context tokens; word B with 24,
    // a superset sharing the same mean direction. A's specificity should
    // come out above B's in at least 19 of 20 seeded trials.
    int wins = 0;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        Rng gen(900 + trial);
        TokenDocs docs;
        for (int i = 0; i < 260; ++i) {
            std::vector<std::string> doc;
            const bool concentrated = i % 2 == 0;
            doc.push_back(concentrated ? "aa" : "bb");
            for (int j = 0; j < 5; ++j) {
                const int ctx = concentrated
                                    ? static_cast<int>(gen.below(3))
                                    : static_cast<int>(gen.below(24));
                doc.push_back("c" + std::to_string(ctx));
            }
            docs.push_back(std::move(doc));
        }
        const auto vocab = build_vocabulary(docs, 1);
        const auto corpus = encode(docs, vocab);
        const NegativeTable table(vocab, 0.75);

        TrainConfig config;
        config.dim = 16;
        config.window = 5;
        config.negatives = 5;
        config.max_iter = 5;
        config.topic_weight = 0.0;
        config.seed = trial + 1;
        auto state = init_state(vocab.size(), corpus.doc_count, 2, config);
        LrSchedule schedule(config.initial_lr,
                            corpus.total_tokens * config.max_iter);
        Rng rng(derive_seed(config.seed, 1));
        const SeedLabels labels(vocab.size(), kNoCategory);
        for (int pass = 0; pass < config.max_iter; ++pass) {
            train_pass(state, corpus, labels, table, config, schedule, rng);
        }
        if (state.kappa[vocab.id_of("aa")] > state.kappa[vocab.id_of("bb")]) {
            ++wins;
        }
    }
    CHECK(wins >= 19);
}

TEST_CASE("vmf normalizer matches the closed form at p = 3") {
    for (double kappa : {0.1, 1.0, 10.0, 100.0}) {
        // c_3(kappa) = kappa / (4 pi sinh kappa); compare in log space.
        const double log_sinh =
            kappa + std::log1p(-std::exp(-2.0 * kappa)) - std::log(2.0);
        const double expected = std::log(kappa) - std::log(4.0 * kPi) - log_sinh;
        CHECK(std::abs(vmf_log_normalizer(kappa, 3) - expected) < 1e-10);
    }
    CHECK(std::exp(vmf_log_normalizer(1.0, 3)) ==
          doctest::Approx(0.06769).epsilon(1e-3));
}

TEST_CASE("vmf normalizer limits to the uniform sphere constant") {
    CHECK(std::abs(vmf_log_normalizer(0.0, 3) - std::log(1.0 / (4.0 * kPi))) <
          1e-12);
    // Tiny kappa stays close to the limit.
    CHECK(vmf_log_normalizer(1e-8, 3) ==
          doctest::Approx(std::log(1.0 / (4.0 * kPi))).epsilon(1e-6));
}

TEST_CASE("vmf density integrates to one over the sphere") {
    for (double kappa : {0.5, 2.0, 8.0}) {
        const double log_c = vmf_log_normalizer(kappa, 3);
        // Integrate c * exp(kappa t) * 2 pi over t in [-1, 1] by Simpson.
        const int n = 20000;
        const double hstep = 2.0 / n;
        double integral = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double t = -1.0 + i * hstep;
            const double f = std::exp(log_c + kappa * t) * 2.0 * kPi;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            integral += w * f;
        }
        integral *= hstep / 3.0;
        CHECK(std::abs(integral - 1.0) < 1e-3);
    }
}

TEST_CASE("vmf normalizer stays finite at large kappa and dimension") {
    CHECK(std::isfinite(vmf_log_normalizer(1e4, 100)));
    CHECK(std::isfinite(vmf_log_normalizer(1e4, 3)));
    CHECK(std::isfinite(vmf_log_normalizer(123.4, 2)));
}
