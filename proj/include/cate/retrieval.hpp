#pragma once

#include <cstdint>
#include <vector>

#include "cate/corpus.hpp"
#include "cate/embedding.hpp"

namespace cate {

struct RankedCandidate {
    WordId word = kNoWord;
    double sim = 0.0;        // cosine similarity to the category vector
    double spec = 0.0;       // kappa of the word
    std::size_t rank_sim = 0;   // 1-based, by sim descending
    std::size_t rank_spec = 0;  // 1-based, by kappa ascending
};

// All vocabulary words with corpus count >= min_count_retrieval, excluding
// the category-name tokens. Throws when the pool comes out empty.
std::vector<WordId> candidate_pool(const Vocabulary& vocab,
                                   std::int64_t min_count_retrieval,
                                   const std::vector<WordId>& category_names);

// The rank-product selection rule: among pool \ current_seeds restricted to
// kappa_w > kappa of the category-name token, picks the argmin of
// rank_sim * rank_spec with ranks computed over the restricted set. Ties
// break by smaller rank_sim, then smaller word id.
WordId select_representative(const EmbeddingState& state, WordId category_name,
                             std::size_t category, const std::vector<WordId>& pool,
                             const std::vector<WordId>& current_seeds);

// Ranked view of the feasible set used by select_representative, exposed for
// reporting. Entries are ordered by ascending rank product with the same
// tie-breaking as the selection rule.
std::vector<RankedCandidate> rank_candidates(const EmbeddingState& state,
                                             WordId category_name,
                                             std::size_t category,
                                             const std::vector<WordId>& pool,
                                             const std::vector<WordId>& current_seeds);

struct SpecificityBucket {
    double lower = 0.0;            // exclusive
    double upper = 0.0;            // inclusive; infinity for the open band
    std::vector<WordId> words;     // top words by similarity, kappa in band
};

// Coarse-to-fine bands (m_j * kappa_c, m_{j+1} * kappa_c] plus the open top
// band, each holding the top words by cosine similarity to the category.
std::vector<SpecificityBucket> specificity_buckets(
    const EmbeddingState& state, std::size_t category, WordId category_name,
    const std::vector<WordId>& pool, const std::vector<double>& multipliers,
    std::size_t top_m_per_bucket);

}  // namespace cate
