#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace psaw {

// Gap between consecutive chain elements. nullopt = unrestricted (plain
// AND); a value b = adjacency with at most b characters between the end of
// one element's occurrence and the start of the next ({0,b}).
using Gap = std::optional<int>;

// A chain element is a bare word (words.size() == 1) or an inner OR of
// distinct words. Inner ORs never nest other functions.
struct ChainElement {
    std::vector<std::string> words;
    bool is_inner_or() const { return words.size() > 1; }
    bool operator==(const ChainElement&) const = default;
};

// Ordered AND/adjacency of elements. gaps.size() == elements.size() - 1.
struct Chain {
    std::vector<ChainElement> elements;
    std::vector<Gap> gaps;
    bool operator==(const Chain&) const = default;
};

// The outer OR structure: a list of alternative chains.
struct OuterOr {
    std::vector<Chain> alternatives;
    bool empty() const { return alternatives.empty(); }
    bool operator==(const OuterOr&) const = default;
};

// One constrained regex: positive part filtered by a single negative part.
// A document matches iff the positive part matches and the negative part
// does not.
struct RegexRule {
    OuterOr positive;
    OuterOr negative;
    bool operator==(const RegexRule&) const = default;
};

// An ordered vector of rules; a document is in the class iff any rule
// matches.
struct Classifier {
    std::vector<RegexRule> rules;
    bool operator==(const Classifier&) const = default;
};

// Free-form expression tree over words, OR, AND-with-gaps, and NOT: the
// input language of normalize().
struct UnconstrainedExpr {
    enum class Kind { Word, Or, And, Not };
    Kind kind = Kind::Word;
    std::string word;                      // Kind::Word
    std::vector<UnconstrainedExpr> children;
    std::vector<Gap> gaps;                 // Kind::And: children.size() - 1

    static UnconstrainedExpr make_word(std::string w);
    static UnconstrainedExpr make_or(std::vector<UnconstrainedExpr> children);
    static UnconstrainedExpr make_and(std::vector<UnconstrainedExpr> children,
                                      std::vector<Gap> gaps);
    static UnconstrainedExpr make_and(std::vector<UnconstrainedExpr> children);
    static UnconstrainedExpr make_not(UnconstrainedExpr child);
    bool operator==(const UnconstrainedExpr&) const = default;
};

struct Violation {
    int condition = 0;   // 1..4, matching the structural conditions
    std::string path;    // location in the AST, e.g. "positive.alt[2].elem[0]"
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_structure(const RegexRule& rule);
ValidationReport validate_structure(const UnconstrainedExpr& expr);

// Rewrites an unconstrained expression into an equivalent constrained rule:
// double negations cancel, negated conjuncts move to the negative part,
// nested ORs flatten, and AND distributes over OR with gap bounds carried
// verbatim. Throws ConfigError for trees whose negations cannot be reduced
// to a single trailing NOT (e.g. a NOT under OR).
RegexRule normalize(const UnconstrainedExpr& expr);
RegexRule normalize(const RegexRule& rule);
UnconstrainedExpr to_unconstrained(const RegexRule& rule);

bool matches_outer(const OuterOr& outer, const std::string& text);
bool match_rule(const RegexRule& rule, const std::string& text);
bool match_classifier(const Classifier& classifier, const std::string& text);

// Standard-syntax patterns for an external engine. The accept rule is:
// positive pattern matches AND negative pattern does not.
struct DecodedRule {
    std::string positive_pattern;
    std::string negative_pattern;
};
DecodedRule decode(const RegexRule& rule);

// Total word occurrences across both parts (the size measure capped by
// the mutation complexity limit).
int complexity(const RegexRule& rule);
int complexity(const Classifier& classifier);

// Canonical bracketed form "(P).(#_#(N))"; see docs/classifier_format.md.
// parse_canonical(to_canonical(r)) == r for every valid rule.
std::string to_canonical(const RegexRule& rule);
RegexRule parse_canonical(const std::string& text);

// Classifier file: JSON envelope holding the canonical rule forms, the
// decoded patterns, and the run metadata.
struct ClassifierFile {
    std::string target_class;
    double beta = 0.2;
    std::uint64_t seed = 0;
    std::string strategy = "psaw";
    Classifier classifier;
};

void save_classifier(const ClassifierFile& file, const std::string& path);
ClassifierFile load_classifier(const std::string& path);

} // namespace psaw
