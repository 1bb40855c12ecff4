// Command-line surface for category-name guided topic mining: train and mine
// topics, inspect embeddings and specificity, and score mined topics.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cate/corpus.hpp"
#include "cate/embedding.hpp"
#include "cate/error.hpp"
#include "cate/eval.hpp"
#include "cate/io.hpp"
#include "cate/miner.hpp"
#include "cate/retrieval.hpp"

namespace fs = std::filesystem;

namespace {

int log_level() {
    const char* env = std::getenv("CATE_LOG");
    return env ? std::atoi(env) : 0;
}

void log_info(const std::string& msg) {
    if (log_level() > 0) std::cerr << "[cate] " << msg << '\n';
}

struct MineOptions {
    std::string corpus_path;
    std::string categories_path;
    std::string out_dir = ".";
    std::string config_path;
    cate::TrainConfig config;
    bool parallel = false;
};

void apply_config_file(cate::TrainConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cate::Error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    if (j.contains("dim")) config.dim = j["dim"].get<int>();
    if (j.contains("window")) config.window = j["window"].get<int>();
    if (j.contains("negatives")) config.negatives = j["negatives"].get<int>();
    if (j.contains("max_iter")) config.max_iter = j["max_iter"].get<int>();
    if (j.contains("initial_lr")) config.initial_lr = j["initial_lr"].get<double>();
    if (j.contains("topic_weight"))
        config.topic_weight = j["topic_weight"].get<double>();
    if (j.contains("min_count"))
        config.min_count = j["min_count"].get<std::int64_t>();
    if (j.contains("min_count_retrieval"))
        config.min_count_retrieval = j["min_count_retrieval"].get<std::int64_t>();
    if (j.contains("sample_power"))
        config.sample_power = j["sample_power"].get<double>();
    if (j.contains("kappa_min")) config.kappa_min = j["kappa_min"].get<double>();
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("deterministic"))
        config.deterministic = j["deterministic"].get<bool>();
    if (j.contains("threads")) config.threads = j["threads"].get<int>();
}

int run_mine(const MineOptions& opts) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();

    cate::TrainConfig config = opts.config;
    if (!opts.config_path.empty()) apply_config_file(config, opts.config_path);
    config.deterministic = !opts.parallel;
    if (opts.parallel && config.threads < 2) config.threads = 2;

    const auto categories = cate::read_category_file(opts.categories_path);
    log_info("mining " + std::to_string(categories.size()) + " categories from " +
             opts.corpus_path);

    fs::create_directories(opts.out_dir);
    const auto result = cate::mine_file(opts.corpus_path, categories, config);

    const std::string topics_path = opts.out_dir + "/topics.tsv";
    const std::string details_path = opts.out_dir + "/details.tsv";
    const std::string runlog_path = opts.out_dir + "/runlog.json";
    const std::string ckpt_path = opts.out_dir + "/model.ckpt";
    cate::write_topics_file(topics_path, result);
    cate::write_details_file(details_path, result);
    cate::write_runlog_json(runlog_path, result);
    cate::save_checkpoint(ckpt_path, {result.config, result.category_names,
                                      result.vocab, result.state});

    const double seconds =
        std::chrono::duration<double>(clock::now() - start).count();
    nlohmann::json manifest{
        {"mode", config.deterministic ? "deterministic" : "parallel"},
        {"seconds", seconds},
        {"inputs",
         {{"corpus",
           {{"path", opts.corpus_path},
            {"digest", cate::file_digest(opts.corpus_path)}}},
          {"categories",
           {{"path", opts.categories_path},
            {"digest", cate::file_digest(opts.categories_path)}}}}},
        {"outputs", {topics_path, details_path, runlog_path, ckpt_path}},
    };
    manifest["config"] = {{"dim", config.dim},
                          {"window", config.window},
                          {"negatives", config.negatives},
                          {"max_iter", config.max_iter},
                          {"initial_lr", config.initial_lr},
                          {"topic_weight", config.topic_weight},
                          {"min_count", config.min_count},
                          {"min_count_retrieval", config.min_count_retrieval},
                          {"sample_power", config.sample_power},
                          {"kappa_min", config.kappa_min},
                          {"seed", config.seed},
                          {"deterministic", config.deterministic},
                          {"threads", config.threads}};
    std::ofstream mf(opts.out_dir + "/manifest.json");
    mf << manifest.dump(2) << '\n';

    std::cout << "wrote " << topics_path << " (" << categories.size()
              << " categories)\n";
    return 0;
}

int run_export(const std::string& ckpt_path, const std::string& what,
               const std::string& out_path) {
    const auto ckpt = cate::load_checkpoint(ckpt_path);
    if (what == "words") {
        cate::export_word_vectors(out_path, ckpt.vocab, ckpt.state);
    } else if (what == "kappa") {
        cate::export_kappa(out_path, ckpt.vocab, ckpt.state);
    } else if (what == "categories") {
        cate::export_category_vectors(out_path, ckpt.category_names,
                                      ckpt.state);
    } else {
        throw cate::Error("unknown export target: " + what);
    }
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

int run_entail(const std::string& ckpt_path, const std::string& pairs_path,
               const std::string& report_path) {
    const auto ckpt = cate::load_checkpoint(ckpt_path);
    const auto pairs = cate::read_pairs_file(pairs_path);
    if (pairs.empty()) throw cate::Error("no pairs");
    const auto report = cate::entailment_accuracy(pairs, ckpt.state, ckpt.vocab);

    nlohmann::json j{{"total_pairs", report.total_pairs},
                     {"evaluated", report.evaluated},
                     {"correct", report.correct},
                     {"undecided", report.undecided},
                     {"skipped_oov", report.skipped_oov},
                     {"coverage", report.coverage}};
    if (report.accuracy) {
        j["entailment_accuracy"] = *report.accuracy;
        std::printf("accuracy %.4f coverage %.4f (skipped %lld OOV)\n",
                    *report.accuracy, report.coverage,
                    static_cast<long long>(report.skipped_oov));
    } else {
        std::printf("accuracy undefined: no in-vocabulary pairs (coverage %.4f)\n",
                    report.coverage);
    }
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        out << j.dump(2) << '\n';
    }
    return 0;
}

int run_present(const std::string& ckpt_path, const std::string& multipliers_csv,
                std::size_t top_m, const std::string& only_category,
                const std::string& out_path) {
    const auto ckpt = cate::load_checkpoint(ckpt_path);

    std::vector<double> multipliers;
    {
        std::istringstream ss(multipliers_csv);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) multipliers.push_back(std::stod(item));
        }
    }

    std::vector<cate::WordId> name_ids;
    for (const auto& name : ckpt.category_names) {
        const cate::WordId id = ckpt.vocab.id_of(name);
        if (id == cate::kNoWord) {
            throw cate::Error("category name not in vocabulary: " + name);
        }
        name_ids.push_back(id);
    }
    if (!only_category.empty()) {
        bool known = false;
        for (const auto& name : ckpt.category_names) known |= name == only_category;
        if (!known) throw cate::Error("unknown category: " + only_category);
    }

    const auto pool = cate::candidate_pool(
        ckpt.vocab, ckpt.config.min_count_retrieval, name_ids);

    std::ostringstream report;
    for (std::size_t i = 0; i < ckpt.category_names.size(); ++i) {
        if (!only_category.empty() && ckpt.category_names[i] != only_category) {
            continue;
        }
        const double kappa_c = ckpt.state.kappa[name_ids[i]];
        const auto buckets = cate::specificity_buckets(
            ckpt.state, i, name_ids[i], pool, multipliers, top_m);
        cate::write_bucket_report(report, ckpt.category_names[i], kappa_c,
                                  buckets, ckpt.vocab);
        report << '\n';
    }
    if (out_path.empty()) {
        std::cout << report.str();
    } else {
        std::ofstream out(out_path);
        out << report.str();
        std::cout << "wrote " << out_path << '\n';
    }
    return 0;
}

void write_metric_report(const std::string& path, const char* field,
                         double value) {
    if (path.empty()) return;
    nlohmann::json j{{field, value}};
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

int run_coherence(const std::string& topics_path, const std::string& corpus_path,
                  const std::string& report_path) {
    const auto topics = cate::read_topics_file(topics_path);
    const auto docs = cate::read_corpus_file(corpus_path);
    const double tc = cate::topic_coherence(topics, docs);
    std::printf("%.4f\n", tc);
    write_metric_report(report_path, "tc", tc);
    return 0;
}

int run_macc(const std::string& topics_path, const std::string& labels_path,
             const std::string& report_path) {
    const auto topics = cate::read_topics_file(topics_path);
    const auto labels = cate::read_labels_file(labels_path);
    const double macc = cate::mean_accuracy(topics, labels);
    std::printf("%.4f\n", macc);
    write_metric_report(report_path, "macc", macc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"category-name guided discriminative topic mining"};
    app.require_subcommand(1);

    MineOptions mine_opts;
    auto* mine = app.add_subcommand("mine", "mine topics from a corpus");
    mine->add_option("--corpus", mine_opts.corpus_path, "corpus file, one document per line")
        ->required();
    mine->add_option("--categories", mine_opts.categories_path,
                     "category-name file, one name per line")
        ->required();
    mine->add_option("--out", mine_opts.out_dir, "output directory");
    mine->add_option("--config", mine_opts.config_path,
                     "JSON config file; its values take precedence over flags");
    mine->add_option("--dim", mine_opts.config.dim, "embedding dimension");
    mine->add_option("--window", mine_opts.config.window, "context window size");
    mine->add_option("--negatives", mine_opts.config.negatives,
                     "negative samples per target");
    mine->add_option("--iters", mine_opts.config.max_iter, "training iterations");
    mine->add_option("--lr", mine_opts.config.initial_lr, "initial learning rate");
    mine->add_option("--lambda", mine_opts.config.topic_weight,
                     "category supervision weight");
    mine->add_option("--min-count", mine_opts.config.min_count,
                     "vocabulary frequency cutoff");
    mine->add_option("--min-count-retrieval", mine_opts.config.min_count_retrieval,
                     "retrieval pool frequency cutoff");
    mine->add_option("--power", mine_opts.config.sample_power,
                     "negative sampling distribution power");
    mine->add_option("--seed", mine_opts.config.seed, "RNG seed");
    mine->add_flag("--deterministic,!--parallel", mine_opts.config.deterministic,
                   "single-worker bitwise-reproducible training (default)");
    mine->add_option("--threads", mine_opts.config.threads,
                     "worker count for parallel mode");

    std::string ckpt_path, pairs_path, report_path;
    auto* entail = app.add_subcommand(
        "entail", "lexical entailment direction from specificity");
    entail->add_option("--checkpoint", ckpt_path, "model checkpoint")->required();
    entail->add_option("--pairs", pairs_path, "hyponym<TAB>hypernym pairs file")
        ->required();
    entail->add_option("--report", report_path, "JSON report path");

    std::string present_ckpt, multipliers = "1,1.25,1.5,1.75", present_out,
                present_category;
    std::size_t top_m = 4;
    auto* present = app.add_subcommand(
        "present", "coarse-to-fine specificity bucket report");
    present->add_option("--checkpoint", present_ckpt, "model checkpoint")
        ->required();
    present->add_option("--multipliers", multipliers,
                        "comma-separated kappa band multipliers");
    present->add_option("--top", top_m, "words per bucket");
    present->add_option("--category", present_category, "restrict to one category");
    present->add_option("--out", present_out, "report path (default stdout)");

    std::string topics_path, corpus_path, labels_path, metrics_report;
    auto* coherence =
        app.add_subcommand("coherence", "document-level NPMI topic coherence");
    coherence->add_option("--topics", topics_path, "topics.tsv")->required();
    coherence->add_option("--corpus", corpus_path, "corpus file")->required();
    coherence->add_option("--report", metrics_report, "JSON report path");

    auto* macc = app.add_subcommand("macc", "mean accuracy against a label file");
    macc->add_option("--topics", topics_path, "topics.tsv")->required();
    macc->add_option("--labels", labels_path, "category<TAB>term<TAB>0|1 file")
        ->required();
    macc->add_option("--report", metrics_report, "JSON report path");

    std::string export_ckpt, export_what = "words", export_out;
    auto* exp = app.add_subcommand("export", "write embeddings as text");
    exp->add_option("--checkpoint", export_ckpt, "model checkpoint")->required();
    exp->add_option("--what", export_what, "words | kappa | categories");
    exp->add_option("--out", export_out, "output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (mine->parsed()) {
            mine_opts.parallel = !mine_opts.config.deterministic;
            return run_mine(mine_opts);
        }
        if (entail->parsed()) return run_entail(ckpt_path, pairs_path, report_path);
        if (present->parsed()) {
            return run_present(present_ckpt, multipliers, top_m,
                               present_category, present_out);
        }
        if (coherence->parsed()) {
            return run_coherence(topics_path, corpus_path, metrics_report);
        }
        if (macc->parsed()) return run_macc(topics_path, labels_path, metrics_report);
        if (exp->parsed()) return run_export(export_ckpt, export_what, export_out);
    } catch (const cate::DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
