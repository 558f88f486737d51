#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "psaw/corpus.hpp"
#include "psaw/regex_model.hpp"

namespace psaw {

struct ConfusionCounts {
    std::size_t true_matches = 0;  // matched positives
    std::size_t false_matches = 0; // matched negatives
    std::size_t positives_total = 0;
};

struct EvalMetrics {
    ConfusionCounts counts;
    double precision = 0;
    double recall = 0;
    double f_beta = 0;
    double beta = 0;
};

// Precision = tm/(tm+fm) (0 when no matches), recall = tm/positives_total,
// F_beta = (1+b^2)PR/(b^2 P + R) (0 when the denominator vanishes).
// positives_total must be >= 1.
EvalMetrics metrics_from_counts(const ConfusionCounts& counts, double beta);

// Exact counts. With an index, postings prefilter candidate documents for
// the positive part of each rule (a superset of true matches); every
// candidate is confirmed by match_rule, so counts equal the scan path.
// Words missing from the index impose no constraint.
ConfusionCounts confusion_counts(const Classifier& classifier, const BinaryDataset& dataset,
                                 const InvertedIndex* index = nullptr);

struct EvalOptions {
    bool use_prefilter = true;
    int workers = 1;
};

// Reusable evaluation engine over a fixed dataset: lazy substring postings
// for prefiltering, per-rule match bitsets cached by canonical form (so
// re-evaluating a classifier that differs in one rule only re-matches that
// rule), and deterministic document sharding across workers.
class Evaluator {
public:
    explicit Evaluator(const BinaryDataset& dataset, EvalOptions options = {});

    ConfusionCounts confusion(const Classifier& classifier) const;
    EvalMetrics evaluate(const Classifier& classifier, double beta) const;
    double objective(const Classifier& classifier, double beta) const;

    std::size_t document_count() const { return docs_.size(); }

private:
    using Bits = std::vector<std::uint64_t>;

    const Bits& rule_matches(const RegexRule& rule) const;
    const Bits& word_postings(const std::string& word) const;
    Bits positive_candidates(const RegexRule& rule) const;
    void confirm_rule(const RegexRule& rule, const std::vector<std::uint32_t>& slots,
                      Bits& out) const;

    std::vector<Document> docs_; // positives first
    std::size_t positive_count_ = 0;
    EvalOptions options_;
    mutable std::unordered_map<std::string, Bits> rule_cache_;
    mutable std::unordered_map<std::string, Bits> posting_cache_;
};

// Human-readable one-line metrics summary: "class p r f tm fm pt".
std::string format_metrics_line(const std::string& cls, const EvalMetrics& m);

} // namespace psaw
