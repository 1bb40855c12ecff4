#include "cate/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "cate/error.hpp"
#include "cate/num.hpp"

namespace cate {

std::vector<WordId> candidate_pool(const Vocabulary& vocab,
                                   std::int64_t min_count_retrieval,
                                   const std::vector<WordId>& category_names) {
    std::unordered_set<WordId> names(category_names.begin(),
                                     category_names.end());
    std::vector<WordId> pool;
    for (std::size_t w = 0; w < vocab.size(); ++w) {
        if (vocab.counts[w] < min_count_retrieval) continue;
        if (names.count(static_cast<WordId>(w))) continue;
        pool.push_back(static_cast<WordId>(w));
    }
    if (pool.empty()) throw Error("empty candidate pool");
    return pool;
}

namespace {

double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = norm(a);
    const double nb = norm(b);
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

}  // namespace

std::vector<RankedCandidate> rank_candidates(
    const EmbeddingState& state, WordId category_name, std::size_t category,
    const std::vector<WordId>& pool, const std::vector<WordId>& current_seeds) {
    const double kappa_c = state.kappa[category_name];
    std::unordered_set<WordId> taken(current_seeds.begin(),
                                     current_seeds.end());

    std::vector<RankedCandidate> feasible;
    for (WordId w : pool) {
        if (taken.count(w)) continue;
        if (!(state.kappa[w] > kappa_c)) continue;
        RankedCandidate rc;
        rc.word = w;
        rc.spec = state.kappa[w];
        rc.sim = cosine(state.u_row(w), state.c_row(category));
        feasible.push_back(rc);
    }
    if (feasible.empty()) return feasible;

    std::vector<std::size_t> order(feasible.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    // rank_sim: similarity descending, word id breaking value ties.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (feasible[a].sim != feasible[b].sim)
            return feasible[a].sim > feasible[b].sim;
        return feasible[a].word < feasible[b].word;
    });
    for (std::size_t r = 0; r < order.size(); ++r) {
        feasible[order[r]].rank_sim = r + 1;
    }

    // rank_spec: kappa ascending.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (feasible[a].spec != feasible[b].spec)
            return feasible[a].spec < feasible[b].spec;
        return feasible[a].word < feasible[b].word;
    });
    for (std::size_t r = 0; r < order.size(); ++r) {
        feasible[order[r]].rank_spec = r + 1;
    }

    std::sort(feasible.begin(), feasible.end(),
              [](const RankedCandidate& a, const RankedCandidate& b) {
                  const std::size_t pa = a.rank_sim * a.rank_spec;
                  const std::size_t pb = b.rank_sim * b.rank_spec;
                  if (pa != pb) return pa < pb;
                  if (a.rank_sim != b.rank_sim) return a.rank_sim < b.rank_sim;
                  return a.word < b.word;
              });
    return feasible;
}

WordId select_representative(const EmbeddingState& state, WordId category_name,
                             std::size_t category,
                             const std::vector<WordId>& pool,
                             const std::vector<WordId>& current_seeds) {
    const auto ranked =
        rank_candidates(state, category_name, category, pool, current_seeds);
    if (ranked.empty()) {
        throw Error("no candidate more specific than category name");
    }
    return ranked.front().word;
}

std::vector<SpecificityBucket> specificity_buckets(
    const EmbeddingState& state, std::size_t category, WordId category_name,
    const std::vector<WordId>& pool, const std::vector<double>& multipliers,
    std::size_t top_m_per_bucket) {
    const double kappa_c = state.kappa[category_name];
    if (!(kappa_c > 0.0)) throw Error("category kappa must be positive");
    if (multipliers.empty()) throw Error("at least one multiplier required");
    for (std::size_t i = 0; i < multipliers.size(); ++i) {
        if (multipliers[i] <= 0.0 ||
            (i > 0 && multipliers[i] <= multipliers[i - 1])) {
            throw Error("multipliers must be positive and strictly increasing");
        }
    }

    std::vector<SpecificityBucket> buckets(multipliers.size());
    for (std::size_t b = 0; b < multipliers.size(); ++b) {
        buckets[b].lower = multipliers[b] * kappa_c;
        buckets[b].upper = b + 1 < multipliers.size()
                               ? multipliers[b + 1] * kappa_c
                               : std::numeric_limits<double>::infinity();
    }

    for (WordId w : pool) {
        const double k = state.kappa[w];
        for (auto& bucket : buckets) {
            if (k > bucket.lower && k <= bucket.upper) {
                bucket.words.push_back(w);
                break;
            }
        }
    }

    for (auto& bucket : buckets) {
        std::sort(bucket.words.begin(), bucket.words.end(),
                  [&](WordId a, WordId b) {
                      const double sa =
                          cosine(state.u_row(a), state.c_row(category));
                      const double sb =
                          cosine(state.u_row(b), state.c_row(category));
                      if (sa != sb) return sa > sb;
                      return a < b;
                  });
        if (bucket.words.size() > top_m_per_bucket) {
            bucket.words.resize(top_m_per_bucket);
        }
    }
    return buckets;
}

}  // namespace cate
