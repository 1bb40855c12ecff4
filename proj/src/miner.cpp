#include "cate/miner.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "cate/error.hpp"
#include "cate/retrieval.hpp"

namespace cate {

SeedSets SeedSets::from_names(const std::vector<WordId>& name_ids) {
    SeedSets seeds;
    seeds.names = name_ids;
    seeds.sets.resize(name_ids.size());
    seeds.iterations.resize(name_ids.size());
    for (std::size_t i = 0; i < name_ids.size(); ++i) {
        seeds.sets[i].push_back(name_ids[i]);
        seeds.iterations[i].push_back(0);
    }
    return seeds;
}

void SeedSets::add(std::size_t category, WordId word, int iteration) {
    sets[category].push_back(word);
    iterations[category].push_back(iteration);
}

bool SeedSets::contains(WordId word) const {
    for (const auto& set : sets) {
        if (std::find(set.begin(), set.end(), word) != set.end()) return true;
    }
    return false;
}

std::vector<WordId> SeedSets::all_members() const {
    std::vector<WordId> all;
    for (const auto& set : sets) all.insert(all.end(), set.begin(), set.end());
    return all;
}

SeedLabels SeedSets::labels(std::size_t vocab_size) const {
    SeedLabels labels(vocab_size, kNoCategory);
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (WordId w : sets[i]) labels[w] = static_cast<std::int32_t>(i);
    }
    return labels;
}

MiningResult mine(const TokenDocs& docs,
                  const std::vector<std::string>& category_names,
                  const TrainConfig& config) {
    config.validate();
    if (category_names.empty()) throw Error("no category names given");

    MiningResult result;
    result.category_names = category_names;
    result.config = config;
    result.vocab = build_vocabulary(docs, config.min_count);

    std::vector<WordId> name_ids;
    std::unordered_set<WordId> seen_names;
    for (const auto& name : category_names) {
        const WordId id = result.vocab.id_of(name);
        if (id == kNoWord) {
            throw Error("category name not in vocabulary: " + name);
        }
        if (!seen_names.insert(id).second) {
            throw Error("duplicate category name: " + name);
        }
        name_ids.push_back(id);
    }

    result.corpus = encode(docs, result.vocab);
    result.state = init_state(result.vocab.size(), result.corpus.doc_count,
                              category_names.size(), config);
    result.seeds = SeedSets::from_names(name_ids);

    const NegativeTable table(result.vocab, config.sample_power);
    LrSchedule schedule(config.initial_lr,
                        result.corpus.total_tokens * config.max_iter);
    Rng train_rng(derive_seed(config.seed, 1));

    for (int iter = 1; iter <= config.max_iter; ++iter) {
        IterationLog log_entry;
        log_entry.iteration = iter;

        const SeedLabels labels = result.seeds.labels(result.vocab.size());
        if (config.deterministic || config.threads <= 1) {
            log_entry.stats =
                train_pass(result.state, result.corpus, labels, table, config,
                           schedule, train_rng);
        } else {
            log_entry.stats = train_pass_parallel(
                result.state, result.corpus, labels, table, config, schedule,
                static_cast<std::uint64_t>(iter));
        }

        // One shared pool per iteration; removing every selected word keeps
        // the seed sets pairwise disjoint. A pool that comes out empty is a
        // per-category selection failure, not an abort.
        std::vector<WordId> pool;
        std::string pool_error;
        try {
            pool = candidate_pool(result.vocab, config.min_count_retrieval,
                                  name_ids);
        } catch (const Error& e) {
            pool_error = e.what();
        }
        {
            const auto members = result.seeds.all_members();
            std::unordered_set<WordId> taken(members.begin(), members.end());
            std::erase_if(pool, [&](WordId w) { return taken.count(w) > 0; });
        }

        for (std::size_t i = 0; i < result.seeds.n_categories(); ++i) {
            SelectionRecord record;
            record.category = i;
            try {
                if (!pool_error.empty()) throw Error(pool_error);
                const WordId w = select_representative(
                    result.state, name_ids[i], i, pool, result.seeds.sets[i]);
                record.word = w;
                record.kappa = result.state.kappa[w];
                {
                    const auto uw = result.state.u_row(w);
                    const auto ci = result.state.c_row(i);
                    double nu = 0.0, nc = 0.0, dp = 0.0;
                    for (std::size_t j = 0; j < uw.size(); ++j) {
                        nu += uw[j] * uw[j];
                        nc += ci[j] * ci[j];
                        dp += uw[j] * ci[j];
                    }
                    record.sim = dp / std::sqrt(nu * nc);
                }
                result.seeds.add(i, w, iter);
                std::erase(pool, w);
            } catch (const Error& e) {
                record.error = e.what();
            }
            log_entry.selections.push_back(std::move(record));
        }
        result.log.push_back(std::move(log_entry));
    }

    // Final topics exclude the category names themselves.
    result.topics.resize(result.seeds.n_categories());
    for (std::size_t i = 0; i < result.seeds.n_categories(); ++i) {
        for (std::size_t j = 1; j < result.seeds.sets[i].size(); ++j) {
            const WordId w = result.seeds.sets[i][j];
            const int iter = result.seeds.iterations[i][j];
            for (const auto& entry : result.log) {
                if (entry.iteration != iter) continue;
                for (const auto& rec : entry.selections) {
                    if (rec.category == i && rec.word == w) {
                        result.topics[i].push_back(
                            {result.vocab.words[w], rec.kappa, rec.sim, iter});
                    }
                }
            }
        }
    }
    return result;
}

MiningResult mine_file(const std::string& corpus_path,
                       const std::vector<std::string>& category_names,
                       const TrainConfig& config) {
    return mine(read_corpus_file(corpus_path), category_names, config);
}

}  // namespace cate
