#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psaw/corpus.hpp"
#include "psaw/embeddings.hpp"
#include "psaw/evaluator.hpp"
#include "psaw/operators.hpp"
#include "psaw/regex_model.hpp"
#include "psaw/rng.hpp"

namespace psaw {

struct AnnealConfig {
    double t_start = 0.5;
    double t_end = 0.05;
    int pool_capacity = 10;    // N_pool
    int total_iterations = 1000; // K
    double beta = 0.2;
    int rules_per_solution = 3; // m
    double td_f = 5.0;
    int n_w = 100;
    double td_s = 0.75;
    int stall_limit = 200;
    std::uint64_t seed = 0;

    int complexity_cap = 60;
    double positive_part_prob = 0.5;
    int workers = 1;
    bool use_prefilter = true;
    bool psaw_i_filter_negatives = true;
};

struct PoolEntry {
    Classifier solution;
    double objective = 0;
    int size = 0; // complexity, the sort tie-break
};

struct PoolState {
    std::vector<PoolEntry> elites;
    std::vector<PoolEntry> neighbours;
    PoolEntry best;
    double temperature = 0;
    int iteration = 0;
};

struct HistoryRecord {
    int round = 0;
    double temperature = 0;
    double best_objective = 0;
    double mean_elite_objective = 0;
    int accepted = 0;
};

struct TrainResult {
    Classifier best;
    EvalMetrics metrics; // on the training dataset
    std::vector<HistoryRecord> history;
    double wall_time_seconds = 0; // excluded from serialized artifacts
    std::vector<std::string> notes;
};

enum class PartitionMode { KMeans, Random };

// Keyword grouping and seed solution construction: frequency-ratio
// keywords, top n_w by frequency, transitive similarity groups above td_s,
// one uniformly chosen group per rule as a single inner OR. If td_f yields
// no keywords it is halved up to three times.
Classifier build_initial_solution(const BinaryDataset& dataset, const EmbeddingTable& embeddings,
                                  const AnnealConfig& config, Rng& rng);

// Geometric interpolation from t_start (k=0) to t_end (k=K).
double temperature_at(int k, const AnnealConfig& config);

// Accept improvements always; accept a worsening of delta < 0 with
// probability exp(delta / temperature).
bool metropolis_accept(double delta, double temperature, Rng& rng);

// Word pools for the mutation operators, derived from the dataset's
// smoothed frequency ratios.
MutationContext build_mutation_context(const BinaryDataset& dataset,
                                       const EmbeddingTable& embeddings,
                                       const AnnealConfig& config);

// One evolution round: every elite spawns a neighbour, each neighbour
// challenges a random elite slot under the Metropolis criterion, then the
// retained best re-enters, the pool is sorted (objective desc, smaller
// complexity first, stable) and truncated. Returns the acceptance count.
int replacement_round(PoolState& state, const MutationContext& ctx, const Evaluator& evaluator,
                      const AnnealConfig& config, Rng& rng);

TrainResult run_psaw(const BinaryDataset& dataset, const EmbeddingTable& embeddings,
                     const AnnealConfig& config);

// Iterative variant: learns single-rule classifiers one after another,
// filtering documents matched by the previous rules out of the working
// set; the concatenation is evaluated on the full dataset.
TrainResult run_psaw_i(const BinaryDataset& dataset, const EmbeddingTable& embeddings,
                       const AnnealConfig& config);

// Parallel variant: the positive set is partitioned (semantic k-means over
// document vectors, or a shuffled even split), one single-rule search runs
// concurrently per part against the full negative set, and the per-part
// best rules are concatenated in part order.
TrainResult run_psaw_p(const BinaryDataset& dataset, const EmbeddingTable& embeddings,
                       const AnnealConfig& config, PartitionMode mode);

// Lloyd iterations with farthest-point seeding, deterministic for a fixed
// rng stream; returns cluster assignment per row.
std::vector<int> kmeans_partition(const std::vector<std::vector<double>>& points, int k,
                                  Rng& rng, int max_iterations = 50);

// Working-set reduction between PSAW-I stages: every document matched by
// the rule leaves the positive side (and the negative side when
// filter_negatives is set).
BinaryDataset filter_matched(const BinaryDataset& dataset, const RegexRule& rule,
                             bool filter_negatives);

// Shuffled even split into m parts; sizes differ by at most one.
std::vector<int> shuffled_partition(std::size_t n, int m, Rng& rng);

void save_history(const std::vector<HistoryRecord>& history, const std::string& path);

} // namespace psaw
