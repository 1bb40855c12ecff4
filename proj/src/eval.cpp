#include "cate/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cate/error.hpp"

namespace cate {

namespace {

// Document-membership bitmaps for exactly the terms under evaluation.
std::unordered_map<std::string, std::vector<bool>> doc_membership(
    const TopicSet& topics, const TokenDocs& docs) {
    std::unordered_map<std::string, std::vector<bool>> present;
    for (const auto& terms : topics.terms) {
        for (const auto& term : terms) {
            present.emplace(term, std::vector<bool>(docs.size(), false));
        }
    }
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& tok : docs[d]) {
            auto it = present.find(tok);
            if (it != present.end()) it->second[d] = true;
        }
    }
    return present;
}

double npmi(const std::vector<bool>& a, const std::vector<bool>& b,
            std::size_t n_docs) {
    std::size_t both = 0, na = 0, nb = 0;
    for (std::size_t d = 0; d < n_docs; ++d) {
        na += a[d];
        nb += b[d];
        both += a[d] && b[d];
    }
    if (both == 0) return -1.0;
    if (both == n_docs) return 1.0;  // co-occur everywhere: the p -> 1 limit
    const double pa = static_cast<double>(na) / n_docs;
    const double pb = static_cast<double>(nb) / n_docs;
    const double pab = static_cast<double>(both) / n_docs;
    return -std::log(pab / (pa * pb)) / std::log(pab);
}

}  // namespace

double topic_coherence(const TopicSet& topics, const TokenDocs& docs) {
    if (docs.empty()) throw Error("empty corpus");
    const auto present = doc_membership(topics, docs);
    for (const auto& [term, mask] : present) {
        if (std::find(mask.begin(), mask.end(), true) == mask.end()) {
            throw Error("term absent from corpus: " + term);
        }
    }

    double sum_over_topics = 0.0;
    std::size_t topics_with_pairs = 0;
    for (const auto& terms : topics.terms) {
        if (terms.size() < 2) continue;
        double sum = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            for (std::size_t j = i + 1; j < terms.size(); ++j) {
                sum += npmi(present.at(terms[i]), present.at(terms[j]),
                            docs.size());
                ++pairs;
            }
        }
        sum_over_topics += sum / static_cast<double>(pairs);
        ++topics_with_pairs;
    }
    if (topics_with_pairs == 0) {
        throw Error("topic coherence needs at least one topic with 2+ terms");
    }
    return sum_over_topics / static_cast<double>(topics_with_pairs);
}

double mean_accuracy(const TopicSet& topics, const TermLabels& labels) {
    if (topics.categories.empty()) throw Error("no topics given");
    std::vector<std::string> gaps;
    double sum = 0.0;
    for (std::size_t k = 0; k < topics.categories.size(); ++k) {
        const auto& terms = topics.terms[k];
        if (terms.empty()) continue;
        std::int64_t in_category = 0;
        for (const auto& term : terms) {
            const auto it = labels.find({topics.categories[k], term});
            if (it == labels.end()) {
                gaps.push_back(topics.categories[k] + "/" + term);
                continue;
            }
            in_category += it->second ? 1 : 0;
        }
        sum += static_cast<double>(in_category) /
               static_cast<double>(terms.size());
    }
    if (!gaps.empty()) {
        std::string msg = "missing labels for:";
        for (const auto& g : gaps) msg += " " + g;
        throw Error(msg);
    }
    return sum / static_cast<double>(topics.categories.size());
}

Hypernym entailment_direction(const EmbeddingState& state,
                              const Vocabulary& vocab,
                              const std::string& word_a,
                              const std::string& word_b) {
    const WordId a = vocab.id_of(word_a);
    const WordId b = vocab.id_of(word_b);
    if (a == kNoWord) throw Error("out-of-vocabulary token: " + word_a);
    if (b == kNoWord) throw Error("out-of-vocabulary token: " + word_b);
    if (state.kappa[a] == state.kappa[b]) return Hypernym::Undecided;
    return state.kappa[a] < state.kappa[b] ? Hypernym::WordA : Hypernym::WordB;
}

EntailmentReport entailment_accuracy(const std::vector<EntailmentPair>& pairs,
                                     const EmbeddingState& state,
                                     const Vocabulary& vocab) {
    EntailmentReport report;
    report.total_pairs = static_cast<std::int64_t>(pairs.size());
    for (const auto& pair : pairs) {
        if (vocab.id_of(pair.hyponym) == kNoWord ||
            vocab.id_of(pair.hypernym) == kNoWord) {
            ++report.skipped_oov;
            continue;
        }
        const Hypernym pred =
            entailment_direction(state, vocab, pair.hyponym, pair.hypernym);
        ++report.evaluated;
        if (pred == Hypernym::Undecided) {
            ++report.undecided;
        } else if (pred == Hypernym::WordB) {
            ++report.correct;
        }
    }
    if (report.evaluated > 0) {
        report.accuracy = static_cast<double>(report.correct) /
                          static_cast<double>(report.evaluated);
    }
    if (report.total_pairs > 0) {
        report.coverage = static_cast<double>(report.evaluated) /
                          static_cast<double>(report.total_pairs);
    }
    return report;
}

std::vector<EntailmentPair> read_pairs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open pairs file: " + path);
    std::vector<EntailmentPair> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        EntailmentPair pair;
        if (!std::getline(ss, pair.hyponym, '\t') ||
            !std::getline(ss, pair.hypernym, '\t') || pair.hyponym.empty() ||
            pair.hypernym.empty()) {
            throw Error("malformed pair at line " + std::to_string(line_no) +
                        ": " + line);
        }
        if (pair.hyponym == pair.hypernym) {
            throw Error("entailment pair with identical tokens at line " +
                        std::to_string(line_no));
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

TopicSet read_topics_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open topics file: " + path);
    TopicSet topics;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw Error("malformed topic line: " + line);
        }
        topics.categories.push_back(line.substr(0, tab));
        std::vector<std::string> terms;
        std::istringstream ss(line.substr(tab + 1));
        std::string term;
        while (std::getline(ss, term, ',')) {
            if (!term.empty()) terms.push_back(term);
        }
        topics.terms.push_back(std::move(terms));
    }
    if (topics.categories.empty()) throw Error("no topics in file: " + path);
    return topics;
}

TermLabels read_labels_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open labels file: " + path);
    TermLabels labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string category, term, value;
        if (!std::getline(ss, category, '\t') || !std::getline(ss, term, '\t') ||
            !std::getline(ss, value) || (value != "0" && value != "1")) {
            throw Error("malformed label at line " + std::to_string(line_no) +
                        ": " + line);
        }
        labels[{category, term}] = value == "1";
    }
    return labels;
}

}  // namespace cate
