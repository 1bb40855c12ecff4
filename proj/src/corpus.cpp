#include "cate/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cate/error.hpp"

namespace cate {

Vocabulary build_vocabulary(const TokenDocs& docs, std::int64_t min_count) {
    if (min_count < 1) throw Error("min_count must be >= 1");

    std::unordered_map<std::string, std::int64_t> freq;
    std::int64_t seen = 0;
    for (const auto& doc : docs) {
        for (const auto& tok : doc) {
            ++freq[tok];
            ++seen;
        }
    }
    if (seen == 0) throw Error("empty corpus");

    std::vector<std::pair<std::string, std::int64_t>> kept;
    kept.reserve(freq.size());
    for (const auto& [tok, count] : freq) {
        if (count >= min_count) kept.emplace_back(tok, count);
    }
    if (kept.empty()) throw Error("vocabulary empty after cutoff");

    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary vocab;
    vocab.words.reserve(kept.size());
    vocab.counts.reserve(kept.size());
    for (const auto& [tok, count] : kept) {
        vocab.index.emplace(tok, static_cast<WordId>(vocab.words.size()));
        vocab.words.push_back(tok);
        vocab.counts.push_back(count);
        vocab.total_tokens += count;
    }
    return vocab;
}

EncodedCorpus encode(const TokenDocs& docs, const Vocabulary& vocab) {
    EncodedCorpus corpus;
    for (const auto& doc : docs) {
        std::vector<WordId> ids;
        ids.reserve(doc.size());
        for (const auto& tok : doc) {
            const WordId id = vocab.id_of(tok);
            if (id != kNoWord) ids.push_back(id);
        }
        if (ids.empty()) continue;
        corpus.total_tokens += static_cast<std::int64_t>(ids.size());
        corpus.documents.push_back(std::move(ids));
    }
    corpus.doc_count = corpus.documents.size();
    return corpus;
}

NegativeTable::NegativeTable(const Vocabulary& vocab, double power)
    : power_(power) {
    cumulative_.reserve(vocab.size());
    double total = 0.0;
    for (std::size_t w = 0; w < vocab.size(); ++w) {
        total += std::pow(static_cast<double>(vocab.counts[w]), power_);
        cumulative_.push_back(total);
    }
    if (cumulative_.empty() || total <= 0.0) {
        throw Error("negative table requires positive sampling weights");
    }
}

WordId NegativeTable::sample(Rng& rng, WordId exclude) const {
    if (cumulative_.size() < 2 && exclude != kNoWord) {
        throw Error("no negatives available");
    }
    const double total = cumulative_.back();
    for (int attempt = 0; attempt < 1 << 20; ++attempt) {
        const double x = rng.uniform() * total;
        const auto it =
            std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
        WordId w = static_cast<WordId>(
            std::min<std::size_t>(it - cumulative_.begin(),
                                  cumulative_.size() - 1));
        if (w != exclude) return w;
    }
    throw Error("no negatives available");
}

namespace {

std::string lowercased(std::string s) {
    for (char& c : s) {
        c = static_cast<char>(
            std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

}  // namespace

TokenDocs read_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file: " + path);
    TokenDocs docs;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::vector<std::string> tokens;
        std::string tok;
        while (ss >> tok) tokens.push_back(lowercased(tok));
        docs.push_back(std::move(tokens));
    }
    return docs;
}

std::vector<std::string> read_category_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open category file: " + path);
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tok;
        if (ss >> tok) names.push_back(lowercased(tok));
    }
    return names;
}

}  // namespace cate
