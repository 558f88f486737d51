#include "psaw/regex_model.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "psaw/errors.hpp"

namespace psaw {

// ---- construction -------------------------------------------------------

UnconstrainedExpr UnconstrainedExpr::make_word(std::string w) {
    UnconstrainedExpr e;
    e.kind = Kind::Word;
    e.word = std::move(w);
    return e;
}

UnconstrainedExpr UnconstrainedExpr::make_or(std::vector<UnconstrainedExpr> children) {
    UnconstrainedExpr e;
    e.kind = Kind::Or;
    e.children = std::move(children);
    return e;
}

UnconstrainedExpr UnconstrainedExpr::make_and(std::vector<UnconstrainedExpr> children,
                                              std::vector<Gap> gaps) {
    UnconstrainedExpr e;
    e.kind = Kind::And;
    e.children = std::move(children);
    e.gaps = std::move(gaps);
    return e;
}

UnconstrainedExpr UnconstrainedExpr::make_and(std::vector<UnconstrainedExpr> children) {
    std::vector<Gap> gaps(children.empty() ? 0 : children.size() - 1, std::nullopt);
    return make_and(std::move(children), std::move(gaps));
}

UnconstrainedExpr UnconstrainedExpr::make_not(UnconstrainedExpr child) {
    UnconstrainedExpr e;
    e.kind = Kind::Not;
    e.children.push_back(std::move(child));
    return e;
}

// ---- validation ---------------------------------------------------------

namespace {

void validate_outer(const OuterOr& outer, const std::string& part, ValidationReport& report) {
    for (std::size_t a = 0; a < outer.alternatives.size(); ++a) {
        const Chain& chain = outer.alternatives[a];
        const std::string chain_path = part + ".alt[" + std::to_string(a) + "]";
        if (chain.elements.empty()) {
            report.violations.push_back({2, chain_path, "empty chain"});
            continue;
        }
        if (chain.gaps.size() != chain.elements.size() - 1) {
            report.violations.push_back({4, chain_path, "gap count must be elements-1"});
        }
        for (std::size_t g = 0; g < chain.gaps.size(); ++g) {
            if (chain.gaps[g].has_value() && *chain.gaps[g] < 0) {
                report.violations.push_back(
                    {4, chain_path + ".gap[" + std::to_string(g) + "]", "negative bound"});
            }
        }
        for (std::size_t e = 0; e < chain.elements.size(); ++e) {
            const ChainElement& elem = chain.elements[e];
            const std::string elem_path = chain_path + ".elem[" + std::to_string(e) + "]";
            if (elem.words.empty()) {
                report.violations.push_back({3, elem_path, "empty element"});
                continue;
            }
            for (const std::string& w : elem.words) {
                if (w.empty()) {
                    report.violations.push_back({3, elem_path, "empty word"});
                } else if (w.find('\n') != std::string::npos ||
                           w.find('\r') != std::string::npos) {
                    report.violations.push_back({3, elem_path, "word contains a line break"});
                }
            }
            std::vector<std::string> sorted = elem.words;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
                report.violations.push_back({3, elem_path, "duplicate word in inner OR"});
            }
        }
        for (std::size_t b = 0; b < a; ++b) {
            if (outer.alternatives[b] == chain) {
                report.violations.push_back({2, chain_path, "duplicate alternative"});
                break;
            }
        }
    }
}

int count_nots(const UnconstrainedExpr& e) {
    int n = e.kind == UnconstrainedExpr::Kind::Not ? 1 : 0;
    for (const auto& c : e.children) n += count_nots(c);
    return n;
}

void validate_expr(const UnconstrainedExpr& e, const std::string& path, bool inner_position,
                   bool not_allowed_here, ValidationReport& report) {
    using Kind = UnconstrainedExpr::Kind;
    switch (e.kind) {
    case Kind::Word:
        if (e.word.empty()) report.violations.push_back({3, path, "empty word"});
        break;
    case Kind::Not:
        if (!not_allowed_here) {
            report.violations.push_back({1, path, "NOT outside the top-level conjunction"});
        }
        if (e.children.size() != 1) {
            report.violations.push_back({1, path, "NOT must have exactly one child"});
        }
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            validate_expr(e.children[i], path + ".not", true, false, report);
        }
        break;
    case Kind::Or:
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            const auto& c = e.children[i];
            const std::string cpath = path + ".or[" + std::to_string(i) + "]";
            if (inner_position && c.kind != Kind::Word && c.kind != Kind::Or) {
                report.violations.push_back(
                    {3, cpath, "inner OR may contain only words and nested ORs of words"});
            }
            if (!inner_position && c.kind == Kind::Or) {
                report.violations.push_back(
                    {2, cpath, "OR nested directly under OR (un-flattened outer structure)"});
            }
            validate_expr(c, cpath, inner_position, false, report);
        }
        break;
    case Kind::And:
        if (!e.children.empty() && e.gaps.size() != e.children.size() - 1) {
            report.violations.push_back({4, path, "gap count must be children-1"});
        }
        for (const Gap& g : e.gaps) {
            if (g.has_value() && *g < 0) {
                report.violations.push_back({4, path, "negative adjacency bound"});
            }
        }
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            validate_expr(e.children[i], path + ".and[" + std::to_string(i) + "]", true,
                          not_allowed_here, report);
        }
        break;
    }
}

} // namespace

ValidationReport validate_structure(const RegexRule& rule) {
    ValidationReport report;
    validate_outer(rule.positive, "positive", report);
    validate_outer(rule.negative, "negative", report);
    return report;
}

ValidationReport validate_structure(const UnconstrainedExpr& expr) {
    ValidationReport report;
    if (count_nots(expr) > 1) {
        report.violations.push_back({1, "root", "more than one NOT function"});
    }
    validate_expr(expr, "root", false, true, report);
    return report;
}

// ---- normalization ------------------------------------------------------

namespace {

bool contains_not(const UnconstrainedExpr& e) {
    if (e.kind == UnconstrainedExpr::Kind::Not) return true;
    for (const auto& c : e.children) {
        if (contains_not(c)) return true;
    }
    return false;
}

UnconstrainedExpr strip_double_not(const UnconstrainedExpr& e) {
    using Kind = UnconstrainedExpr::Kind;
    if (e.kind == Kind::Not && e.children.size() == 1 &&
        e.children[0].kind == Kind::Not && e.children[0].children.size() == 1) {
        return strip_double_not(e.children[0].children[0]);
    }
    UnconstrainedExpr out = e;
    for (auto& c : out.children) c = strip_double_not(c);
    // a child rewrite may surface a new double negation
    if (out.kind == Kind::Not && out.children.size() == 1 &&
        out.children[0].kind == Kind::Not) {
        return strip_double_not(out);
    }
    return out;
}

struct NotSplit {
    std::optional<UnconstrainedExpr> positive;
    std::vector<UnconstrainedExpr> negatives;
};

// Pulls negated conjuncts out of the tree. NOT is reducible only where set
// algebra applies exactly: as a conjunct of an AND (at any depth) with a
// NOT-free argument. Gaps adjacent to removed conjuncts merge to
// unrestricted.
NotSplit split_negations(const UnconstrainedExpr& e) {
    using Kind = UnconstrainedExpr::Kind;
    switch (e.kind) {
    case Kind::Word:
        return {e, {}};
    case Kind::Not: {
        if (e.children.size() != 1) throw ConfigError("normalize: NOT must have one child");
        if (contains_not(e.children[0])) {
            throw ConfigError("normalize: NOT argument must be negation-free");
        }
        return {std::nullopt, {e.children[0]}};
    }
    case Kind::Or: {
        for (const auto& c : e.children) {
            if (contains_not(c)) {
                throw ConfigError(
                    "normalize: NOT under OR cannot be reduced to a single negative part");
            }
        }
        return {e, {}};
    }
    case Kind::And: {
        if (!e.children.empty() && e.gaps.size() != e.children.size() - 1) {
            throw ConfigError("normalize: AND gap count must be children-1");
        }
        NotSplit out;
        std::vector<UnconstrainedExpr> kept;
        std::vector<Gap> kept_gaps;
        bool dropped_since_last_kept = false;
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            NotSplit child = split_negations(e.children[i]);
            for (auto& n : child.negatives) out.negatives.push_back(std::move(n));
            const Gap before = i == 0 ? Gap{} : e.gaps[i - 1];
            if (child.positive.has_value()) {
                if (!kept.empty()) {
                    kept_gaps.push_back(dropped_since_last_kept ? Gap{} : before);
                }
                kept.push_back(std::move(*child.positive));
                dropped_since_last_kept = false;
            } else {
                dropped_since_last_kept = true;
            }
        }
        if (kept.empty()) {
            out.positive = std::nullopt;
        } else {
            out.positive = UnconstrainedExpr::make_and(std::move(kept), std::move(kept_gaps));
        }
        return out;
    }
    }
    throw ConfigError("normalize: unknown node kind");
}

void push_unique_word(std::vector<std::string>& words, const std::string& w) {
    if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
}

// True when an OR subtree holds only words (possibly through nested ORs).
bool pure_word_or(const UnconstrainedExpr& e) {
    using Kind = UnconstrainedExpr::Kind;
    if (e.kind != Kind::Or) return false;
    for (const auto& c : e.children) {
        if (c.kind == Kind::Word) continue;
        if (c.kind == Kind::Or && pure_word_or(c)) continue;
        return false;
    }
    return true;
}

void collect_or_words(const UnconstrainedExpr& e, std::vector<std::string>& out) {
    using Kind = UnconstrainedExpr::Kind;
    if (e.kind == Kind::Word) {
        push_unique_word(out, e.word);
        return;
    }
    for (const auto& c : e.children) collect_or_words(c, out);
}

Chain splice(const Chain& left, const Gap& joint, const Chain& right) {
    Chain out = left;
    if (!out.elements.empty() && !right.elements.empty()) out.gaps.push_back(joint);
    out.elements.insert(out.elements.end(), right.elements.begin(), right.elements.end());
    out.gaps.insert(out.gaps.end(), right.gaps.begin(), right.gaps.end());
    return out;
}

void push_unique_chain(std::vector<Chain>& chains, Chain chain) {
    if (std::find(chains.begin(), chains.end(), chain) == chains.end()) {
        chains.push_back(std::move(chain));
    }
}

std::vector<Chain> chains_of(const UnconstrainedExpr& e, bool and_context);

// Alternatives denoted by an AND node: the cartesian product of its
// children's alternatives, spliced with the AND's own gaps. Bounds on
// distributed edges are carried verbatim.
std::vector<Chain> chains_of_and(const UnconstrainedExpr& e) {
    if (e.children.empty()) return {};
    std::vector<Chain> acc = chains_of(e.children[0], true);
    for (std::size_t i = 1; i < e.children.size(); ++i) {
        const std::vector<Chain> options = chains_of(e.children[i], true);
        std::vector<Chain> next;
        next.reserve(acc.size() * options.size());
        for (const Chain& prefix : acc) {
            for (const Chain& option : options) {
                next.push_back(splice(prefix, e.gaps[i - 1], option));
            }
        }
        acc = std::move(next);
    }
    return acc;
}

std::vector<Chain> chains_of(const UnconstrainedExpr& e, bool and_context) {
    using Kind = UnconstrainedExpr::Kind;
    switch (e.kind) {
    case Kind::Word: {
        if (e.word.empty()) throw ConfigError("normalize: empty word");
        Chain c;
        c.elements.push_back({{e.word}});
        return {c};
    }
    case Kind::Or: {
        // A word-only OR inside a chain stays an inner OR; anything else
        // distributes into separate alternatives.
        if (and_context && pure_word_or(e)) {
            ChainElement elem;
            collect_or_words(e, elem.words);
            if (elem.words.empty()) throw ConfigError("normalize: empty OR");
            Chain c;
            c.elements.push_back(std::move(elem));
            return {c};
        }
        std::vector<Chain> out;
        for (const auto& child : e.children) {
            for (Chain& chain : chains_of(child, false)) {
                push_unique_chain(out, std::move(chain));
            }
        }
        return out;
    }
    case Kind::And:
        return chains_of_and(e);
    case Kind::Not:
        throw ConfigError("normalize: unexpected NOT after negation split");
    }
    throw ConfigError("normalize: unknown node kind");
}

OuterOr outer_from_chains(std::vector<Chain> chains) {
    OuterOr outer;
    for (Chain& c : chains) push_unique_chain(outer.alternatives, std::move(c));
    return outer;
}

} // namespace

RegexRule normalize(const UnconstrainedExpr& expr) {
    const UnconstrainedExpr stripped = strip_double_not(expr);
    NotSplit split = split_negations(stripped);
    if (!split.positive.has_value()) {
        throw ConfigError("normalize: expression denotes a pure negation; no positive part");
    }
    RegexRule rule;
    rule.positive = outer_from_chains(chains_of(*split.positive, false));
    std::vector<Chain> negative_chains;
    for (const auto& n : split.negatives) {
        for (Chain& c : chains_of(n, false)) push_unique_chain(negative_chains, std::move(c));
    }
    rule.negative = outer_from_chains(std::move(negative_chains));
    return rule;
}

UnconstrainedExpr to_unconstrained(const RegexRule& rule) {
    auto outer_to_expr = [](const OuterOr& outer) {
        std::vector<UnconstrainedExpr> alts;
        for (const Chain& chain : outer.alternatives) {
            std::vector<UnconstrainedExpr> elems;
            for (const ChainElement& elem : chain.elements) {
                if (elem.is_inner_or()) {
                    std::vector<UnconstrainedExpr> words;
                    for (const std::string& w : elem.words) {
                        words.push_back(UnconstrainedExpr::make_word(w));
                    }
                    elems.push_back(UnconstrainedExpr::make_or(std::move(words)));
                } else {
                    elems.push_back(UnconstrainedExpr::make_word(elem.words[0]));
                }
            }
            alts.push_back(UnconstrainedExpr::make_and(std::move(elems), chain.gaps));
        }
        return UnconstrainedExpr::make_or(std::move(alts));
    };
    UnconstrainedExpr positive = outer_to_expr(rule.positive);
    if (rule.negative.empty()) return positive;
    std::vector<UnconstrainedExpr> parts;
    parts.push_back(std::move(positive));
    parts.push_back(UnconstrainedExpr::make_not(outer_to_expr(rule.negative)));
    return UnconstrainedExpr::make_and(std::move(parts));
}

RegexRule normalize(const RegexRule& rule) { return normalize(to_unconstrained(rule)); }

// ---- matching -----------------------------------------------------------

namespace {

struct Occurrence {
    int start;
    int end; // exclusive
};

void element_occurrences(const ChainElement& elem, const std::string& text,
                         std::vector<Occurrence>& out) {
    out.clear();
    for (const std::string& w : elem.words) {
        if (w.empty()) continue;
        std::size_t pos = text.find(w);
        while (pos != std::string::npos) {
            out.push_back({static_cast<int>(pos), static_cast<int>(pos + w.size())});
            pos = text.find(w, pos + 1);
        }
    }
    std::sort(out.begin(), out.end(), [](const Occurrence& a, const Occurrence& b) {
        if (a.start != b.start) return a.start < b.start;
        return a.end < b.end;
    });
}

// Backtracking search for an in-order assignment of element occurrences
// honoring the gap constraints. Memoized on (element, previous end).
class ChainMatcher {
public:
    ChainMatcher(const Chain& chain, const std::string& text) : chain_(chain) {
        occurrences_.resize(chain.elements.size());
        for (std::size_t i = 0; i < chain.elements.size(); ++i) {
            element_occurrences(chain.elements[i], text, occurrences_[i]);
            if (occurrences_[i].empty()) {
                feasible_ = false;
                return;
            }
        }
        memo_.assign(chain.elements.size(), {});
    }

    bool match() {
        if (!feasible_) return false;
        return search(0, 0);
    }

private:
    bool search(std::size_t k, int prev_end) {
        if (k == occurrences_.size()) return true;
        auto [it, inserted] = memo_[k].try_emplace(prev_end, false);
        if (!inserted) return it->second;
        const Gap gap = k == 0 ? Gap{} : chain_.gaps[k - 1];
        bool found = false;
        for (const Occurrence& occ : occurrences_[k]) {
            if (occ.start < prev_end) continue;
            if (gap.has_value() && occ.start > prev_end + *gap) break; // sorted by start
            if (search(k + 1, occ.end)) {
                found = true;
                break;
            }
        }
        memo_[k][prev_end] = found;
        return found;
    }

    const Chain& chain_;
    std::vector<std::vector<Occurrence>> occurrences_;
    std::vector<std::unordered_map<int, bool>> memo_;
    bool feasible_ = true;
};

} // namespace

bool matches_outer(const OuterOr& outer, const std::string& text) {
    for (const Chain& chain : outer.alternatives) {
        if (ChainMatcher(chain, text).match()) return true;
    }
    return false;
}

bool match_rule(const RegexRule& rule, const std::string& text) {
    return matches_outer(rule.positive, text) && !matches_outer(rule.negative, text);
}

bool match_classifier(const Classifier& classifier, const std::string& text) {
    for (const RegexRule& rule : classifier.rules) {
        if (match_rule(rule, text)) return true;
    }
    return false;
}

// ---- decoding -----------------------------------------------------------

namespace {

const char* kNeverMatch = "[^\\s\\S]";

std::string escape_regex(const std::string& word) {
    static const std::string meta = "\\^$.|?*+()[]{}";
    std::string out;
    out.reserve(word.size());
    for (char c : word) {
        if (meta.find(c) != std::string::npos) out += '\\';
        out += c;
    }
    return out;
}

std::string render_inner_or(const ChainElement& elem, bool parenthesize) {
    std::string body;
    for (std::size_t w = 0; w < elem.words.size(); ++w) {
        if (w) body += '|';
        body += escape_regex(elem.words[w]);
    }
    return parenthesize ? "(" + body + ")" : body;
}

std::string render_pattern_outer(const OuterOr& outer) {
    if (outer.empty()) return kNeverMatch;
    std::string body;
    for (std::size_t a = 0; a < outer.alternatives.size(); ++a) {
        if (a) body += '|';
        const Chain& chain = outer.alternatives[a];
        for (std::size_t e = 0; e < chain.elements.size(); ++e) {
            if (e > 0) {
                const Gap& gap = chain.gaps[e - 1];
                body += gap.has_value() ? ".{0," + std::to_string(*gap) + "}" : ".*";
            }
            const ChainElement& elem = chain.elements[e];
            if (elem.is_inner_or()) {
                // a lone inner OR needs no parens of its own: the outer
                // shell groups it, and alternation is associative
                body += render_inner_or(elem, chain.elements.size() > 1);
            } else {
                body += escape_regex(elem.words[0]);
            }
        }
    }
    return ".*((" + body + ")).*";
}

} // namespace

DecodedRule decode(const RegexRule& rule) {
    return {render_pattern_outer(rule.positive), render_pattern_outer(rule.negative)};
}

int complexity(const RegexRule& rule) {
    int total = 0;
    for (const OuterOr* outer : {&rule.positive, &rule.negative}) {
        for (const Chain& chain : outer->alternatives) {
            for (const ChainElement& elem : chain.elements) {
                total += static_cast<int>(elem.words.size());
            }
        }
    }
    return total;
}

int complexity(const Classifier& classifier) {
    int total = 0;
    for (const RegexRule& rule : classifier.rules) total += complexity(rule);
    return total;
}

// ---- canonical form -----------------------------------------------------

namespace {

// characters with grammar meaning in the canonical form
const std::string kCanonMeta = "\\|(){}*. \t";

std::string escape_canonical(const std::string& word) {
    std::string out;
    out.reserve(word.size());
    for (char c : word) {
        if (kCanonMeta.find(c) != std::string::npos) out += '\\';
        out += c;
    }
    return out;
}

std::string canonical_outer(const OuterOr& outer) {
    std::string body;
    for (std::size_t a = 0; a < outer.alternatives.size(); ++a) {
        if (a) body += '|';
        const Chain& chain = outer.alternatives[a];
        for (std::size_t e = 0; e < chain.elements.size(); ++e) {
            if (e > 0) {
                const Gap& gap = chain.gaps[e - 1];
                body += gap.has_value() ? ".{0," + std::to_string(*gap) + "}" : ".*";
            }
            const ChainElement& elem = chain.elements[e];
            if (elem.is_inner_or()) {
                body += '(';
                for (std::size_t w = 0; w < elem.words.size(); ++w) {
                    if (w) body += '|';
                    body += escape_canonical(elem.words[w]);
                }
                body += ')';
            } else {
                body += escape_canonical(elem.words[0]);
            }
        }
    }
    return body;
}

class CanonicalParser {
public:
    explicit CanonicalParser(const std::string& text) : text_(text) {}

    RegexRule parse_rule() {
        expect('(');
        RegexRule rule;
        rule.positive = parse_outer();
        expect(')');
        expect_literal(".(#_#(");
        rule.negative = parse_outer();
        expect_literal("))");
        if (pos_ != text_.size()) fail("trailing characters");
        return rule;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw DataError("canonical rule parse error at offset " + std::to_string(pos_) + ": " +
                        why);
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void expect_literal(const std::string& lit) {
        if (text_.compare(pos_, lit.size(), lit) != 0) fail("expected \"" + lit + "\"");
        pos_ += lit.size();
    }

    bool at_word_char() const {
        const char c = peek();
        return c != '\0' && c != '|' && c != '(' && c != ')' && c != '.' && c != '{' &&
               c != '}' && c != '*' && c != ' ' && c != '\t';
    }

    std::string parse_word() {
        std::string word;
        while (true) {
            const char c = peek();
            if (c == '\\') {
                if (pos_ + 1 >= text_.size()) fail("dangling escape");
                word += text_[pos_ + 1];
                pos_ += 2;
                continue;
            }
            if (!at_word_char()) break;
            word += c;
            ++pos_;
        }
        if (word.empty()) fail("expected a word");
        return word;
    }

    ChainElement parse_element() {
        ChainElement elem;
        if (peek() == '(') {
            ++pos_;
            elem.words.push_back(parse_word());
            while (peek() == '|') {
                ++pos_;
                elem.words.push_back(parse_word());
            }
            expect(')');
        } else {
            elem.words.push_back(parse_word());
        }
        return elem;
    }

    // gap marker: ".*" or ".{0,<int>}"
    std::optional<Gap> try_parse_gap() {
        if (peek() != '.') return std::nullopt;
        if (text_.compare(pos_, 2, ".*") == 0) {
            pos_ += 2;
            return Gap{};
        }
        if (text_.compare(pos_, 4, ".{0,") == 0) {
            pos_ += 4;
            std::string digits;
            while (peek() >= '0' && peek() <= '9') {
                digits += peek();
                ++pos_;
            }
            if (digits.empty()) fail("expected a bound after '.{0,'");
            expect('}');
            return Gap{std::stoi(digits)};
        }
        fail("expected a gap marker '.*' or '.{0,b}'");
    }

    Chain parse_chain() {
        Chain chain;
        chain.elements.push_back(parse_element());
        while (true) {
            std::optional<Gap> gap = try_parse_gap();
            if (!gap.has_value()) break;
            chain.gaps.push_back(*gap);
            chain.elements.push_back(parse_element());
        }
        return chain;
    }

    OuterOr parse_outer() {
        OuterOr outer;
        if (peek() == ')') return outer; // empty part
        outer.alternatives.push_back(parse_chain());
        while (peek() == '|') {
            ++pos_;
            outer.alternatives.push_back(parse_chain());
        }
        return outer;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

} // namespace

std::string to_canonical(const RegexRule& rule) {
    return "(" + canonical_outer(rule.positive) + ").(#_#(" + canonical_outer(rule.negative) +
           "))";
}

RegexRule parse_canonical(const std::string& text) {
    return CanonicalParser(text).parse_rule();
}

// ---- classifier files ---------------------------------------------------

void save_classifier(const ClassifierFile& file, const std::string& path) {
    nlohmann::json obj;
    obj["format"] = "psaw-classifier";
    obj["version"] = 1;
    obj["target_class"] = file.target_class;
    obj["beta"] = file.beta;
    obj["seed"] = file.seed;
    obj["strategy"] = file.strategy;
    nlohmann::json rules = nlohmann::json::array();
    for (const RegexRule& rule : file.classifier.rules) {
        const DecodedRule decoded = decode(rule);
        rules.push_back({{"ast", to_canonical(rule)},
                         {"positive_pattern", decoded.positive_pattern},
                         {"negative_pattern", decoded.negative_pattern}});
    }
    obj["rules"] = std::move(rules);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write classifier file: " + path);
    out << obj.dump(2) << '\n';
}

ClassifierFile load_classifier(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open classifier file: " + path);
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed classifier file " + path + ": " + e.what());
    }
    try {
        if (obj.value("format", "") != "psaw-classifier") {
            throw DataError("not a psaw classifier file: " + path);
        }
        ClassifierFile file;
        file.target_class = obj.at("target_class").get<std::string>();
        file.beta = obj.value("beta", 0.2);
        file.seed = obj.value("seed", std::uint64_t{0});
        file.strategy = obj.value("strategy", "psaw");
        for (const auto& r : obj.at("rules")) {
            file.classifier.rules.push_back(parse_canonical(r.at("ast").get<std::string>()));
        }
        return file;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed classifier file " + path + ": " + e.what());
    }
}

} // namespace psaw
