#include "cate/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cate/error.hpp"
#include "json.hpp"

namespace cate {

namespace {

constexpr const char* kMagic = "CATE1";

std::string fmt(double x, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, x);
    return buf;
}

nlohmann::json config_to_json(const TrainConfig& c) {
    return {{"dim", c.dim},
            {"window", c.window},
            {"negatives", c.negatives},
            {"max_iter", c.max_iter},
            {"initial_lr", c.initial_lr},
            {"topic_weight", c.topic_weight},
            {"min_count", c.min_count},
            {"min_count_retrieval", c.min_count_retrieval},
            {"sample_power", c.sample_power},
            {"kappa_min", c.kappa_min},
            {"seed", c.seed},
            {"deterministic", c.deterministic},
            {"threads", c.threads}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.dim = j.at("dim").get<int>();
    c.window = j.at("window").get<int>();
    c.negatives = j.at("negatives").get<int>();
    c.max_iter = j.at("max_iter").get<int>();
    c.initial_lr = j.at("initial_lr").get<double>();
    c.topic_weight = j.at("topic_weight").get<double>();
    c.min_count = j.at("min_count").get<std::int64_t>();
    c.min_count_retrieval = j.at("min_count_retrieval").get<std::int64_t>();
    c.sample_power = j.at("sample_power").get<double>();
    c.kappa_min = j.at("kappa_min").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.deterministic = j.at("deterministic").get<bool>();
    c.threads = j.at("threads").get<int>();
    return c;
}

void write_block(std::ofstream& out, const char* name,
                 const std::vector<double>& block, std::size_t rows,
                 std::size_t cols) {
    out << name << ' ' << rows << ' ' << cols << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (j) out << ' ';
            out << fmt(block[r * cols + j], "%.17g");
        }
        out << '\n';
    }
}

std::vector<double> read_block(std::ifstream& in, const char* name,
                               std::size_t* rows_out, std::size_t* cols_out) {
    std::string tag;
    std::size_t rows = 0, cols = 0;
    if (!(in >> tag >> rows >> cols) || tag != name) {
        throw Error("corrupt checkpoint: expected block " + std::string(name));
    }
    std::vector<double> block(rows * cols);
    for (double& x : block) {
        if (!(in >> x)) throw Error("corrupt checkpoint: truncated block");
    }
    *rows_out = rows;
    *cols_out = cols;
    return block;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write checkpoint: " + path);
    out << kMagic << '\n';
    out << "config " << config_to_json(ckpt.config).dump() << '\n';
    out << "categories " << ckpt.category_names.size() << '\n';
    for (const auto& name : ckpt.category_names) out << name << '\n';
    out << "vocab " << ckpt.vocab.size() << '\n';
    for (std::size_t w = 0; w < ckpt.vocab.size(); ++w) {
        out << ckpt.vocab.words[w] << ' ' << ckpt.vocab.counts[w] << ' '
            << fmt(ckpt.state.kappa[w], "%.17g") << '\n';
    }
    const auto p = static_cast<std::size_t>(ckpt.state.dim);
    write_block(out, "u", ckpt.state.u, ckpt.state.vocab_size, p);
    write_block(out, "v", ckpt.state.v, ckpt.state.vocab_size, p);
    write_block(out, "d", ckpt.state.d, ckpt.state.doc_count, p);
    write_block(out, "c", ckpt.state.c, ckpt.state.n_categories, p);
    if (!out) throw Error("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open checkpoint: " + path);
    std::string magic;
    if (!std::getline(in, magic) || magic != kMagic) {
        throw Error("not a checkpoint file (bad magic): " + path);
    }
    Checkpoint ckpt;
    std::string tag;
    if (!(in >> tag) || tag != "config") throw Error("corrupt checkpoint: config");
    std::string config_line;
    std::getline(in, config_line);
    ckpt.config = config_from_json(nlohmann::json::parse(config_line));

    std::size_t n = 0;
    if (!(in >> tag >> n) || tag != "categories") {
        throw Error("corrupt checkpoint: categories");
    }
    ckpt.category_names.resize(n);
    for (auto& name : ckpt.category_names) in >> name;

    std::size_t vsize = 0;
    if (!(in >> tag >> vsize) || tag != "vocab") {
        throw Error("corrupt checkpoint: vocab");
    }
    ckpt.vocab.words.resize(vsize);
    ckpt.vocab.counts.resize(vsize);
    ckpt.state.kappa.resize(vsize);
    for (std::size_t w = 0; w < vsize; ++w) {
        if (!(in >> ckpt.vocab.words[w] >> ckpt.vocab.counts[w] >>
              ckpt.state.kappa[w])) {
            throw Error("corrupt checkpoint: vocab entries");
        }
        ckpt.vocab.index.emplace(ckpt.vocab.words[w], static_cast<WordId>(w));
        ckpt.vocab.total_tokens += ckpt.vocab.counts[w];
    }

    std::size_t rows = 0, cols = 0;
    ckpt.state.u = read_block(in, "u", &rows, &cols);
    ckpt.state.vocab_size = rows;
    ckpt.state.dim = static_cast<int>(cols);
    ckpt.state.v = read_block(in, "v", &rows, &cols);
    ckpt.state.d = read_block(in, "d", &rows, &cols);
    ckpt.state.doc_count = rows;
    ckpt.state.c = read_block(in, "c", &rows, &cols);
    ckpt.state.n_categories = rows;
    ckpt.state.kappa_min = ckpt.config.kappa_min;

    if (ckpt.state.vocab_size != vsize) {
        throw Error("corrupt checkpoint: vocab/u size mismatch");
    }
    if (ckpt.state.n_categories != ckpt.category_names.size()) {
        throw Error("corrupt checkpoint: category count mismatch");
    }
    return ckpt;
}

namespace {

void export_matrix(const std::string& path,
                   const std::vector<std::string>& tokens,
                   const std::vector<double>& block, std::size_t cols) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path);
    out << tokens.size() << ' ' << cols << '\n';
    for (std::size_t r = 0; r < tokens.size(); ++r) {
        out << tokens[r];
        for (std::size_t j = 0; j < cols; ++j) {
            out << ' ' << fmt(block[r * cols + j], "%.6g");
        }
        out << '\n';
    }
}

}  // namespace

void export_word_vectors(const std::string& path, const Vocabulary& vocab,
                         const EmbeddingState& state) {
    export_matrix(path, vocab.words, state.u,
                  static_cast<std::size_t>(state.dim));
}

void export_kappa(const std::string& path, const Vocabulary& vocab,
                  const EmbeddingState& state) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path);
    for (std::size_t w = 0; w < vocab.size(); ++w) {
        out << vocab.words[w] << ' ' << fmt(state.kappa[w], "%.6g") << '\n';
    }
}

void export_category_vectors(const std::string& path,
                             const std::vector<std::string>& names,
                             const EmbeddingState& state) {
    export_matrix(path, names, state.c, static_cast<std::size_t>(state.dim));
}

void write_topics_file(const std::string& path, const MiningResult& result) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path);
    for (std::size_t i = 0; i < result.category_names.size(); ++i) {
        out << result.category_names[i] << '\t';
        for (std::size_t j = 0; j < result.topics[i].size(); ++j) {
            if (j) out << ',';
            out << result.topics[i][j].term;
        }
        out << '\n';
    }
}

void write_details_file(const std::string& path, const MiningResult& result) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path);
    out << "category\tterm\titeration\tkappa\tsimilarity\n";
    for (std::size_t i = 0; i < result.category_names.size(); ++i) {
        for (const auto& term : result.topics[i]) {
            out << result.category_names[i] << '\t' << term.term << '\t'
                << term.iteration << '\t' << fmt(term.kappa, "%.6f") << '\t'
                << fmt(term.sim, "%.6f") << '\n';
        }
    }
}

void write_runlog_json(const std::string& path, const MiningResult& result) {
    nlohmann::json log = nlohmann::json::array();
    for (const auto& entry : result.log) {
        nlohmann::json selections = nlohmann::json::array();
        for (const auto& rec : entry.selections) {
            nlohmann::json s{{"category", result.category_names[rec.category]}};
            if (rec.word != kNoWord) {
                s["word"] = result.vocab.words[rec.word];
                s["kappa"] = rec.kappa;
                s["sim"] = rec.sim;
            } else {
                s["error"] = rec.error;
            }
            selections.push_back(std::move(s));
        }
        log.push_back({{"iteration", entry.iteration},
                       {"local_loss", entry.stats.local_loss},
                       {"global_loss", entry.stats.global_loss},
                       {"topic_loss", entry.stats.topic_loss},
                       {"local_steps", entry.stats.local_steps},
                       {"global_steps", entry.stats.global_steps},
                       {"topic_steps", entry.stats.topic_steps},
                       {"selections", std::move(selections)}});
    }
    nlohmann::json doc{{"config", config_to_json(result.config)},
                       {"iterations", std::move(log)}};
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path);
    out << doc.dump(2) << '\n';
}

void write_bucket_report(std::ostream& out, const std::string& category_name,
                         double kappa_c,
                         const std::vector<SpecificityBucket>& buckets,
                         const Vocabulary& vocab) {
    out << category_name << " (kappa_c = " << fmt(kappa_c, "%.3f") << ")\n";
    for (const auto& bucket : buckets) {
        if (std::isinf(bucket.upper)) {
            out << "  kappa > " << fmt(bucket.lower, "%.3f");
        } else {
            out << "  " << fmt(bucket.lower, "%.3f") << " < kappa <= "
                << fmt(bucket.upper, "%.3f");
        }
        out << " : ";
        for (std::size_t j = 0; j < bucket.words.size(); ++j) {
            if (j) out << ", ";
            out << vocab.words[bucket.words[j]];
        }
        out << '\n';
    }
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open for digest: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016" PRIx64, hash);
    return hex;
}

}  // namespace cate
