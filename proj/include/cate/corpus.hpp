#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "cate/rng.hpp"

namespace cate {

using WordId = std::uint32_t;
using DocId = std::uint32_t;

inline constexpr WordId kNoWord = std::numeric_limits<WordId>::max();

using TokenDocs = std::vector<std::vector<std::string>>;

// Frequency-filtered vocabulary. Ids are assigned by descending count with
// lexicographic tie-break, so they are deterministic for a fixed corpus.
struct Vocabulary {
    std::vector<std::string> words;
    std::vector<std::int64_t> counts;
    std::unordered_map<std::string, WordId> index;
    std::int64_t total_tokens = 0;

    std::size_t size() const { return words.size(); }

    // kNoWord when the token was filtered or never seen.
    WordId id_of(const std::string& token) const {
        auto it = index.find(token);
        return it == index.end() ? kNoWord : it->second;
    }
};

struct EncodedCorpus {
    std::vector<std::vector<WordId>> documents;
    std::size_t doc_count = 0;
    std::int64_t total_tokens = 0;
};

// Sampling weights proportional to count^power over the vocabulary.
class NegativeTable {
public:
    NegativeTable(const Vocabulary& vocab, double power = 0.75);

    // Draws a word id != exclude with probability proportional to its weight
    // among the non-excluded words (rejection on exclusion). Pass kNoWord to
    // sample from the raw distribution.
    WordId sample(Rng& rng, WordId exclude = kNoWord) const;

    double power() const { return power_; }
    std::size_t size() const { return cumulative_.size(); }

private:
    std::vector<double> cumulative_;
    double power_;
};

Vocabulary build_vocabulary(const TokenDocs& docs, std::int64_t min_count);

// Drops out-of-vocabulary tokens and documents that become empty; document
// order is preserved.
EncodedCorpus encode(const TokenDocs& docs, const Vocabulary& vocab);

// One document per line, tokens split on spaces, lowercased.
TokenDocs read_corpus_file(const std::string& path);

// One category name per line (underscore-joined phrases), lowercased.
std::vector<std::string> read_category_file(const std::string& path);

}  // namespace cate
