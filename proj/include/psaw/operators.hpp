#pragma once

#include <string>
#include <vector>

#include "psaw/embeddings.hpp"
#include "psaw/regex_model.hpp"
#include "psaw/rng.hpp"

namespace psaw {

enum class Part { Positive, Negative };

enum class Operator {
    AddInnerOr = 1, // O1
    AddOuterOr = 2, // O2
    RemoveOr = 3,   // O3
    AddAnd = 4,     // O4
    Swap = 5,       // O5
    Distance = 6,   // O6
    RemoveAnd = 7,  // O7
};

struct MutationContext {
    std::vector<std::string> positive_words; // ranked pool for positive-part edits
    std::vector<std::string> negative_words; // ranked pool for negative-part edits
    std::vector<int> distance_table = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 100};
    const EmbeddingTable* embeddings = nullptr;
    int complexity_cap = 60;
    double positive_part_prob = 0.5;

    const std::vector<std::string>& pool(Part part) const {
        return part == Part::Positive ? positive_words : negative_words;
    }
};

// Neighbourhood operators. Each returns a modified copy; inputs are never
// touched. Preconditions are the applicability tests below; duplicates are
// resampled once and otherwise leave the rule unchanged.
RegexRule o1_add_inner_or(const RegexRule& rule, Part part, const MutationContext& ctx, Rng& rng);
RegexRule o2_add_outer_or(const RegexRule& rule, Part part, const MutationContext& ctx, Rng& rng);
RegexRule o3_remove_or(const RegexRule& rule, Part part, Rng& rng);
RegexRule o4_add_and(const RegexRule& rule, Part part, const MutationContext& ctx, Rng& rng);
RegexRule o5_swap(const RegexRule& rule, Part part, Rng& rng);
RegexRule o6_distance(const RegexRule& rule, Part part, const MutationContext& ctx, Rng& rng);
RegexRule o7_remove_and(const RegexRule& rule, Part part, Rng& rng);

bool operator_applicable(Operator op, const RegexRule& rule, Part part,
                         const MutationContext& ctx);
std::vector<Operator> applicable_operators(const RegexRule& rule, Part part,
                                           const MutationContext& ctx);

RegexRule apply_operator(Operator op, const RegexRule& rule, Part part,
                         const MutationContext& ctx, Rng& rng);

struct MutationOutcome {
    Classifier result;
    std::size_t rule_index = 0;
    Part part = Part::Positive;
    Operator op = Operator::AddOuterOr;
};

// One neighbourhood move: pick a rule uniformly, a part by coin flip, an
// operator uniformly from the applicable subset, and apply it. No-op draws
// are retried a bounded number of times; as a last resort O2 runs on the
// positive part. Throws TrainError when no move can change the solution.
MutationOutcome mutate_detailed(const Classifier& classifier, const MutationContext& ctx,
                                Rng& rng);
Classifier mutate(const Classifier& classifier, const MutationContext& ctx, Rng& rng);

} // namespace psaw
