#include "psaw/annealer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include "psaw/errors.hpp"

namespace psaw {

namespace {

void check_config(const AnnealConfig& config) {
    if (!(0 < config.t_end && config.t_end < config.t_start)) {
        throw ConfigError("temperatures must satisfy 0 < t_end < t_start");
    }
    if (config.pool_capacity < 1) throw ConfigError("pool capacity must be >= 1");
    if (config.total_iterations < 0) throw ConfigError("total iterations must be >= 0");
    if (config.rules_per_solution < 1) throw ConfigError("rules per solution must be >= 1");
    if (config.beta < 0) throw ConfigError("beta must be non-negative");
    if (config.td_f <= 0) throw ConfigError("td_f must be positive");
    if (config.n_w < 1) throw ConfigError("n_w must be >= 1");
}

// Union-find over keyword indices; edges join pairs whose cosine
// similarity exceeds td_s.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

bool entry_before(const PoolEntry& a, const PoolEntry& b) {
    if (a.objective != b.objective) return a.objective > b.objective;
    return a.size < b.size;
}

PoolEntry make_entry(Classifier solution, const Evaluator& evaluator,
                     const AnnealConfig& config) {
    PoolEntry entry;
    entry.objective = evaluator.objective(solution, config.beta);
    entry.size = complexity(solution);
    entry.solution = std::move(solution);
    return entry;
}

} // namespace

std::vector<int> kmeans_partition(const std::vector<std::vector<double>>& points, int k,
                                  Rng& rng, int max_iterations) {
    const std::size_t n = points.size();
    if (k < 1 || n == 0) throw ConfigError("kmeans: need k >= 1 and at least one point");
    if (static_cast<std::size_t>(k) > n) k = static_cast<int>(n);
    const std::size_t dim = points[0].size();

    auto dist2 = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (std::size_t d = 0; d < a.size(); ++d) {
            const double diff = a[d] - b[d];
            s += diff * diff;
        }
        return s;
    };

    // farthest-point seeding from a random first centre
    std::vector<std::vector<double>> centres;
    centres.push_back(points[rng.index(n)]);
    std::vector<double> nearest(n, std::numeric_limits<double>::max());
    while (centres.size() < static_cast<std::size_t>(k)) {
        std::size_t far = 0;
        double far_d = -1;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], dist2(points[i], centres.back()));
            if (nearest[i] > far_d) {
                far_d = nearest[i];
                far = i;
            }
        }
        centres.push_back(points[far]);
    }

    std::vector<int> assignment(n, 0);
    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::max();
            for (int c = 0; c < k; ++c) {
                const double d = dist2(points[i], centres[static_cast<std::size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        std::vector<std::vector<double>> sums(static_cast<std::size_t>(k),
                                              std::vector<double>(dim, 0));
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assignment[i]);
            ++counts[c];
            for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points[i][d];
        }
        for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
            if (counts[c] == 0) continue; // empty cluster keeps its centre
            for (std::size_t d = 0; d < dim; ++d) centres[c][d] = sums[c][d] / counts[c];
        }
    }
    return assignment;
}

std::vector<int> shuffled_partition(std::size_t n, int m, Rng& rng) {
    if (m < 1 || n == 0) throw ConfigError("shuffled_partition: need m >= 1 and n >= 1");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    std::vector<int> assignment(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        assignment[order[i]] = static_cast<int>(i * static_cast<std::size_t>(m) / n);
    }
    return assignment;
}

MutationContext build_mutation_context(const BinaryDataset& dataset,
                                       const EmbeddingTable& embeddings,
                                       const AnnealConfig& config) {
    const FrequencyTable pos = word_frequencies(dataset.positive);
    const FrequencyTable neg = word_frequencies(dataset.negative);
    MutationContext ctx;
    ctx.positive_words = ratio_ranked_words(pos, neg, static_cast<std::size_t>(config.n_w));
    ctx.negative_words = ratio_ranked_words(neg, pos, static_cast<std::size_t>(config.n_w));
    ctx.embeddings = &embeddings;
    ctx.complexity_cap = config.complexity_cap;
    ctx.positive_part_prob = config.positive_part_prob;
    return ctx;
}

Classifier build_initial_solution(const BinaryDataset& dataset, const EmbeddingTable& embeddings,
                                  const AnnealConfig& config, Rng& rng) {
    check_config(config);
    if (dataset.positive.empty()) throw TrainError("dataset has no positive documents");

    const FrequencyTable pos = word_frequencies(dataset.positive);
    const FrequencyTable neg = word_frequencies(dataset.negative);

    double td_f = config.td_f;
    std::vector<std::string> keywords;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        keywords = ratio_keywords(pos, neg, td_f);
        if (!keywords.empty()) break;
        td_f /= 2;
    }
    if (keywords.empty()) {
        throw TrainError("class '" + dataset.target_class +
                         "' has no discriminative vocabulary");
    }
    if (keywords.size() > static_cast<std::size_t>(config.n_w)) {
        keywords.resize(static_cast<std::size_t>(config.n_w));
    }

    // subject-word groups: transitive closure of similarity > td_s
    DisjointSets sets(keywords.size());
    for (std::size_t i = 0; i < keywords.size(); ++i) {
        if (!embeddings.contains(keywords[i])) continue;
        for (std::size_t j = i + 1; j < keywords.size(); ++j) {
            if (!embeddings.contains(keywords[j])) continue;
            if (cosine_similarity(embeddings, keywords[i], keywords[j]) > config.td_s) {
                sets.unite(i, j);
            }
        }
    }
    std::vector<std::vector<std::string>> groups;
    {
        std::vector<int> root_to_group(keywords.size(), -1);
        for (std::size_t i = 0; i < keywords.size(); ++i) {
            const std::size_t root = sets.find(i);
            if (root_to_group[root] < 0) {
                root_to_group[root] = static_cast<int>(groups.size());
                groups.emplace_back();
            }
            groups[static_cast<std::size_t>(root_to_group[root])].push_back(keywords[i]);
        }
    }

    Classifier classifier;
    for (int r = 0; r < config.rules_per_solution; ++r) {
        const std::vector<std::string>& group = groups[rng.index(groups.size())];
        RegexRule rule;
        Chain chain;
        chain.elements.push_back({group});
        rule.positive.alternatives.push_back(std::move(chain));
        classifier.rules.push_back(std::move(rule));
    }
    return classifier;
}

double temperature_at(int k, const AnnealConfig& config) {
    const double ratio = config.t_end / config.t_start;
    const double exponent =
        config.total_iterations == 0
            ? 1.0
            : static_cast<double>(k) / static_cast<double>(config.total_iterations);
    return config.t_start * std::pow(ratio, exponent);
}

bool metropolis_accept(double delta, double temperature, Rng& rng) {
    if (delta >= 0) return true;
    return rng.unit() < std::exp(delta / temperature);
}

int replacement_round(PoolState& state, const MutationContext& ctx, const Evaluator& evaluator,
                      const AnnealConfig& config, Rng& rng) {
    const std::size_t n = state.elites.size();
    state.neighbours.clear();
    for (std::size_t j = 0; j < n; ++j) {
        Classifier neighbour = mutate(state.elites[j].solution, ctx, rng);
        state.neighbours.push_back(make_entry(std::move(neighbour), evaluator, config));
    }

    int accepted = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t slot = rng.index(n);
        const double delta = state.neighbours[j].objective - state.elites[slot].objective;
        if (metropolis_accept(delta, state.temperature, rng)) {
            state.elites[slot] = state.neighbours[j];
            ++accepted;
        }
    }

    // the retained best re-enters; keep the top N_pool
    state.elites.push_back(state.best);
    std::stable_sort(state.elites.begin(), state.elites.end(), entry_before);
    state.elites.resize(n);
    state.best = state.elites.front();
    return accepted;
}

namespace {

TrainResult run_psaw_impl(const BinaryDataset& dataset, const EmbeddingTable& embeddings,
                          const AnnealConfig& config, Rng rng) {
    check_config(config);
    const auto start_time = std::chrono::steady_clock::now();

    const Evaluator evaluator(dataset, {config.use_prefilter, config.workers});
    const MutationContext ctx = build_mutation_context(dataset, embeddings, config);
    const Classifier initial = build_initial_solution(dataset, embeddings, config, rng);

    PoolState state;
    for (int j = 0; j < config.pool_capacity; ++j) {
        state.elites.push_back(make_entry(mutate(initial, ctx, rng), evaluator, config));
    }
    state.best = *std::min_element(state.elites.begin(), state.elites.end(),
                                   [](const PoolEntry& a, const PoolEntry& b) {
                                       return entry_before(a, b);
                                   });

    TrainResult result;
    int stall = 0;
    for (int k = 1; k <= config.total_iterations; ++k) {
        state.iteration = k;
        state.temperature = temperature_at(k, config);
        const double previous_best = state.best.objective;
        const int accepted = replacement_round(state, ctx, evaluator, config, rng);

        double mean = 0;
        for (const PoolEntry& e : state.elites) mean += e.objective;
        mean /= static_cast<double>(state.elites.size());
        result.history.push_back(
            {k, state.temperature, state.best.objective, mean, accepted});

        if (state.best.objective > previous_best) {
            stall = 0;
        } else if (++stall >= config.stall_limit) {
            result.notes.push_back("stopped at round " + std::to_string(k) +
                                   ": best unimproved for " +
                                   std::to_string(config.stall_limit) + " rounds");
            break;
        }
    }

    result.best = state.best.solution;
    result.metrics = evaluator.evaluate(result.best, config.beta);
    result.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return result;
}

} // namespace

TrainResult run_psaw(const BinaryDataset& dataset, const EmbeddingTable& embeddings,
                     const AnnealConfig& config) {
    return run_psaw_impl(dataset, embeddings, config, Rng(config.seed));
}

BinaryDataset filter_matched(const BinaryDataset& dataset, const RegexRule& rule,
                             bool filter_negatives) {
    BinaryDataset out;
    out.target_class = dataset.target_class;
    for (const Document& d : dataset.positive) {
        if (!match_rule(rule, d.text)) out.positive.push_back(d);
    }
    for (const Document& d : dataset.negative) {
        if (filter_negatives && match_rule(rule, d.text)) continue;
        out.negative.push_back(d);
    }
    return out;
}

TrainResult run_psaw_i(const BinaryDataset& dataset, const EmbeddingTable& embeddings,
                       const AnnealConfig& config) {
    check_config(config);
    const auto start_time = std::chrono::steady_clock::now();
    TrainResult result;

    BinaryDataset working = dataset;
    AnnealConfig sub = config;
    sub.rules_per_solution = 1;

    for (int i = 0; i < config.rules_per_solution; ++i) {
        if (working.positive.empty()) {
            result.notes.push_back("stopped after " + std::to_string(i) +
                                   " rules: positive set exhausted");
            break;
        }
        sub.seed = Rng::mix(config.seed, 0x1000 + static_cast<std::uint64_t>(i));
        TrainResult sub_result = run_psaw_impl(working, embeddings, sub, Rng(sub.seed));
        const RegexRule rule = sub_result.best.rules.at(0);
        result.best.rules.push_back(rule);
        for (HistoryRecord& rec : sub_result.history) result.history.push_back(rec);
        for (std::string& note : sub_result.notes) {
            result.notes.push_back("rule " + std::to_string(i) + ": " + std::move(note));
        }
        working = filter_matched(working, rule, config.psaw_i_filter_negatives);
    }

    const Evaluator evaluator(dataset, {config.use_prefilter, config.workers});
    result.metrics = evaluator.evaluate(result.best, config.beta);
    result.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return result;
}

TrainResult run_psaw_p(const BinaryDataset& dataset, const EmbeddingTable& embeddings,
                       const AnnealConfig& config, PartitionMode mode) {
    check_config(config);
    if (config.rules_per_solution < 2) {
        throw ConfigError("psaw-p needs at least 2 rules per solution");
    }
    const auto start_time = std::chrono::steady_clock::now();
    TrainResult result;
    Rng rng(Rng::mix(config.seed, 0x9a3));

    const int m = config.rules_per_solution;
    const std::size_t n = dataset.positive.size();
    if (n == 0) throw TrainError("dataset has no positive documents");

    std::vector<int> assignment(n, 0);
    if (mode == PartitionMode::KMeans) {
        std::vector<std::vector<double>> points;
        points.reserve(n);
        for (const Document& doc : dataset.positive) {
            points.push_back(document_vector(embeddings, doc));
        }
        assignment = kmeans_partition(points, m, rng);
        // merge undersized clusters into the nearest other centroid
        std::vector<std::vector<double>> centroids(static_cast<std::size_t>(m),
                                                   std::vector<double>(points[0].size(), 0));
        std::vector<std::size_t> counts(static_cast<std::size_t>(m), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assignment[i]);
            ++counts[c];
            for (std::size_t d = 0; d < points[i].size(); ++d) centroids[c][d] += points[i][d];
        }
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (counts[c] == 0) continue;
            for (double& x : centroids[c]) x /= static_cast<double>(counts[c]);
        }
        for (int c = 0; c < m; ++c) {
            const auto uc = static_cast<std::size_t>(c);
            if (counts[uc] >= 5 || counts[uc] == 0) continue;
            double best_d = std::numeric_limits<double>::max();
            int target = -1;
            for (int o = 0; o < m; ++o) {
                const auto uo = static_cast<std::size_t>(o);
                if (o == c || counts[uo] < 5) continue;
                double d = 0;
                for (std::size_t dd = 0; dd < centroids[uc].size(); ++dd) {
                    const double diff = centroids[uc][dd] - centroids[uo][dd];
                    d += diff * diff;
                }
                if (d < best_d) {
                    best_d = d;
                    target = o;
                }
            }
            if (target < 0) continue; // nothing big enough to absorb it
            for (std::size_t i = 0; i < n; ++i) {
                if (assignment[i] == c) assignment[i] = target;
            }
            result.notes.push_back("merged cluster " + std::to_string(c) + " (" +
                                   std::to_string(counts[uc]) + " docs) into cluster " +
                                   std::to_string(target));
            counts[static_cast<std::size_t>(target)] += counts[uc];
            counts[uc] = 0;
        }
    } else {
        assignment = shuffled_partition(n, m, rng);
    }

    std::vector<BinaryDataset> parts;
    for (int c = 0; c < m; ++c) {
        BinaryDataset part;
        part.target_class = dataset.target_class;
        for (std::size_t i = 0; i < n; ++i) {
            if (assignment[i] == c) part.positive.push_back(dataset.positive[i]);
        }
        part.negative = dataset.negative;
        if (!part.positive.empty()) parts.push_back(std::move(part));
    }

    std::vector<TrainResult> sub_results(parts.size());
    std::vector<std::thread> threads;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        AnnealConfig sub = config;
        sub.rules_per_solution = 1;
        sub.seed = Rng::mix(config.seed, 0x2000 + p);
        threads.emplace_back([&, p, sub] {
            sub_results[p] = run_psaw_impl(parts[p], embeddings, sub, Rng(sub.seed));
        });
    }
    for (auto& t : threads) t.join();

    for (std::size_t p = 0; p < sub_results.size(); ++p) {
        result.best.rules.push_back(sub_results[p].best.rules.at(0));
        for (HistoryRecord& rec : sub_results[p].history) result.history.push_back(rec);
        for (std::string& note : sub_results[p].notes) {
            result.notes.push_back("part " + std::to_string(p) + ": " + std::move(note));
        }
    }

    const Evaluator evaluator(dataset, {config.use_prefilter, config.workers});
    result.metrics = evaluator.evaluate(result.best, config.beta);
    result.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return result;
}

void save_history(const std::vector<HistoryRecord>& history, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write history file: " + path);
    out << "round\ttemperature\tbest_f\tmean_elite_f\taccepted\n";
    char buf[160];
    for (const HistoryRecord& rec : history) {
        std::snprintf(buf, sizeof(buf), "%d\t%.6f\t%.6f\t%.6f\t%d\n", rec.round,
                      rec.temperature, rec.best_objective, rec.mean_elite_objective,
                      rec.accepted);
        out << buf;
    }
}

} // namespace psaw
