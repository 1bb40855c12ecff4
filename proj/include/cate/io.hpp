#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cate/corpus.hpp"
#include "cate/embedding.hpp"
#include "cate/miner.hpp"
#include "cate/retrieval.hpp"

namespace cate {

// Everything needed to resume inspection of a trained model: the four
// parameter blocks, per-word kappa, vocabulary with counts, category names
// and the resolved config. Text bundle led by the magic string "CATE1".
struct Checkpoint {
    TrainConfig config;
    std::vector<std::string> category_names;
    Vocabulary vocab;
    EmbeddingState state;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// First line "|V| p", then one line per word: token and p reals, space
// separated, 6 significant digits.
void export_word_vectors(const std::string& path, const Vocabulary& vocab,
                         const EmbeddingState& state);

// One line per word: "token kappa".
void export_kappa(const std::string& path, const Vocabulary& vocab,
                  const EmbeddingState& state);

// Same layout as the word export, category names as tokens.
void export_category_vectors(const std::string& path,
                             const std::vector<std::string>& names,
                             const EmbeddingState& state);

// "category<TAB>term1,term2,..." per category.
void write_topics_file(const std::string& path, const MiningResult& result);

// Companion per-term detail: kappa and cosine similarity at selection time.
void write_details_file(const std::string& path, const MiningResult& result);

// JSON run log with per-iteration losses and selections.
void write_runlog_json(const std::string& path, const MiningResult& result);

// Plain-text coarse-to-fine report: one section per category, bands labeled
// with their kappa interval, words comma separated.
void write_bucket_report(std::ostream& out, const std::string& category_name,
                         double kappa_c,
                         const std::vector<SpecificityBucket>& buckets,
                         const Vocabulary& vocab);

// FNV-1a 64-bit content digest, hex encoded.
std::string file_digest(const std::string& path);

}  // namespace cate
