#pragma once

#include <string>
#include <vector>

#include "cate/corpus.hpp"
#include "cate/embedding.hpp"

namespace cate {

// Per-category ordered seed sets. Each set starts with the category-name
// token; retrieved words are appended one per iteration. Sets stay pairwise
// disjoint.
struct SeedSets {
    std::vector<WordId> names;
    std::vector<std::vector<WordId>> sets;        // includes the name at [0]
    std::vector<std::vector<int>> iterations;     // 0 for the name itself

    static SeedSets from_names(const std::vector<WordId>& name_ids);

    std::size_t n_categories() const { return sets.size(); }

    void add(std::size_t category, WordId word, int iteration);
    bool contains(WordId word) const;
    std::vector<WordId> all_members() const;

    // Per-word category labels for the topic loss.
    SeedLabels labels(std::size_t vocab_size) const;
};

struct SelectionRecord {
    std::size_t category = 0;
    WordId word = kNoWord;     // kNoWord when the selection errored
    double kappa = 0.0;
    double sim = 0.0;
    std::string error;
};

struct IterationLog {
    int iteration = 0;
    PassStats stats;
    std::vector<SelectionRecord> selections;
};

struct TopicTerm {
    std::string term;
    double kappa = 0.0;   // at the iteration of its selection
    double sim = 0.0;
    int iteration = 0;
};

struct MiningResult {
    std::vector<std::string> category_names;
    std::vector<std::vector<TopicTerm>> topics;  // category names excluded
    TrainConfig config;
    std::vector<IterationLog> log;

    Vocabulary vocab;
    EncodedCorpus corpus;
    EmbeddingState state;
    SeedSets seeds;
};

// Full mining loop: build the vocabulary and encoded corpus, initialize the
// model, then alternate one training pass with one representative-word
// selection per category until max_iter. Category names are stripped from
// the returned topics.
MiningResult mine(const TokenDocs& docs,
                  const std::vector<std::string>& category_names,
                  const TrainConfig& config);

MiningResult mine_file(const std::string& corpus_path,
                       const std::vector<std::string>& category_names,
                       const TrainConfig& config);

}  // namespace cate
