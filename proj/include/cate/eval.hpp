#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cate/corpus.hpp"
#include "cate/embedding.hpp"

namespace cate {

struct TopicSet {
    std::vector<std::string> categories;
    std::vector<std::vector<std::string>> terms;  // per category
};

// Mean document-level NPMI over unordered term pairs within each topic,
// averaged across topics. A pair with zero document co-occurrence scores -1;
// a pair present in every document scores 1 (the co-occurrence limit).
double topic_coherence(const TopicSet& topics, const TokenDocs& docs);

// (category, term) -> belongs-to-category judgment.
using TermLabels = std::map<std::pair<std::string, std::string>, bool>;

// Fraction of retrieved terms judged to belong to their category, averaged
// over categories.
double mean_accuracy(const TopicSet& topics, const TermLabels& labels);

struct EntailmentPair {
    std::string hyponym;
    std::string hypernym;  // gold direction: second token is the hypernym
};

enum class Hypernym { WordA, WordB, Undecided };

// Predicts the hypernym of a pair as the word with smaller kappa; an exact
// kappa tie is Undecided. Throws on out-of-vocabulary tokens.
Hypernym entailment_direction(const EmbeddingState& state,
                              const Vocabulary& vocab,
                              const std::string& word_a,
                              const std::string& word_b);

struct EntailmentReport {
    std::int64_t total_pairs = 0;
    std::int64_t evaluated = 0;
    std::int64_t correct = 0;
    std::int64_t undecided = 0;
    std::int64_t skipped_oov = 0;
    std::optional<double> accuracy;  // empty when nothing was evaluated
    double coverage = 0.0;
};

// Scores gold-directed pairs; OOV pairs are skipped and counted, undecided
// predictions count as incorrect.
EntailmentReport entailment_accuracy(const std::vector<EntailmentPair>& pairs,
                                     const EmbeddingState& state,
                                     const Vocabulary& vocab);

// Lines "hyponym<TAB>hypernym"; blank lines ignored.
std::vector<EntailmentPair> read_pairs_file(const std::string& path);

// Topic file lines "category<TAB>term1,term2,...".
TopicSet read_topics_file(const std::string& path);

// Label file lines "category<TAB>term<TAB>0|1".
TermLabels read_labels_file(const std::string& path);

}  // namespace cate
