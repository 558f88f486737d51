#include "psaw/operators.hpp"

#include <algorithm>

#include "psaw/errors.hpp"

namespace psaw {

namespace {

OuterOr& part_of(RegexRule& rule, Part part) {
    return part == Part::Positive ? rule.positive : rule.negative;
}

const OuterOr& part_of(const RegexRule& rule, Part part) {
    return part == Part::Positive ? rule.positive : rule.negative;
}

std::size_t element_count(const OuterOr& outer) {
    std::size_t n = 0;
    for (const Chain& c : outer.alternatives) n += c.elements.size();
    return n;
}

std::size_t gap_count(const OuterOr& outer) {
    std::size_t n = 0;
    for (const Chain& c : outer.alternatives) n += c.gaps.size();
    return n;
}

bool has_multi_element_chain(const OuterOr& outer) {
    return std::any_of(outer.alternatives.begin(), outer.alternatives.end(),
                       [](const Chain& c) { return c.elements.size() >= 2; });
}

bool has_deletable_or(const OuterOr& outer) {
    if (!outer.alternatives.empty()) return true;
    return false;
}

// (alternative, element) location of the k-th element in the part
std::pair<std::size_t, std::size_t> locate_element(const OuterOr& outer, std::size_t k) {
    for (std::size_t a = 0; a < outer.alternatives.size(); ++a) {
        const std::size_t n = outer.alternatives[a].elements.size();
        if (k < n) return {a, k};
        k -= n;
    }
    throw ConfigError("operator: element index out of range");
}

bool contains_chain(const OuterOr& outer, const Chain& chain) {
    return std::find(outer.alternatives.begin(), outer.alternatives.end(), chain) !=
           outer.alternatives.end();
}

// A rewrite can make a chain collide with an existing alternative; the
// duplicate is silently dropped (first occurrence wins), which preserves
// the match set.
void drop_duplicate_alternatives(OuterOr& outer) {
    std::vector<Chain> unique;
    unique.reserve(outer.alternatives.size());
    for (Chain& chain : outer.alternatives) {
        if (std::find(unique.begin(), unique.end(), chain) == unique.end()) {
            unique.push_back(std::move(chain));
        }
    }
    outer.alternatives = std::move(unique);
}

std::vector<std::string> sample_pool_words(const std::vector<std::string>& pool, std::size_t k,
                                           Rng& rng) {
    std::vector<std::size_t> idx = rng.sample_indices(pool.size(), k);
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(pool[i]);
    return out;
}

} // namespace

bool operator_applicable(Operator op, const RegexRule& rule, Part part,
                         const MutationContext& ctx) {
    const OuterOr& outer = part_of(rule, part);
    const bool pool_ok = !ctx.pool(part).empty();
    const int size = complexity(rule);
    switch (op) {
    case Operator::AddInnerOr:
        return pool_ok && element_count(outer) >= 1 && size + 1 <= ctx.complexity_cap;
    case Operator::AddOuterOr:
        return pool_ok && size + 2 <= ctx.complexity_cap;
    case Operator::RemoveOr:
        return has_deletable_or(outer);
    case Operator::AddAnd:
        return pool_ok && !outer.alternatives.empty() && size + 1 <= ctx.complexity_cap;
    case Operator::Swap:
        return has_multi_element_chain(outer);
    case Operator::Distance:
        return gap_count(outer) >= 1;
    case Operator::RemoveAnd:
        return has_multi_element_chain(outer);
    }
    return false;
}

std::vector<Operator> applicable_operators(const RegexRule& rule, Part part,
                                           const MutationContext& ctx) {
    static const Operator all[] = {Operator::AddInnerOr, Operator::AddOuterOr,
                                   Operator::RemoveOr,   Operator::AddAnd,
                                   Operator::Swap,       Operator::Distance,
                                   Operator::RemoveAnd};
    std::vector<Operator> out;
    for (Operator op : all) {
        if (operator_applicable(op, rule, part, ctx)) out.push_back(op);
    }
    return out;
}

RegexRule o1_add_inner_or(const RegexRule& rule, Part part, const MutationContext& ctx,
                          Rng& rng) {
    RegexRule out = rule;
    OuterOr& outer = part_of(out, part);
    const std::size_t total = element_count(outer);
    if (total == 0 || ctx.pool(part).empty()) return out;

    const auto [a, e] = locate_element(outer, rng.index(total));
    ChainElement& elem = outer.alternatives[a].elements[e];
    const std::string& anchor = elem.words[rng.index(elem.words.size())];

    static const EmbeddingTable kNoEmbeddings;
    const EmbeddingTable& table = ctx.embeddings ? *ctx.embeddings : kNoEmbeddings;
    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::vector<std::string> candidates = sample_pool_words(ctx.pool(part), 10, rng);
        const std::string chosen = similarity_weighted_choice(table, anchor, candidates, rng);
        if (std::find(elem.words.begin(), elem.words.end(), chosen) == elem.words.end()) {
            elem.words.push_back(chosen);
            drop_duplicate_alternatives(outer);
            return out;
        }
    }
    return rule; // both draws duplicated: no-op
}

RegexRule o2_add_outer_or(const RegexRule& rule, Part part, const MutationContext& ctx,
                          Rng& rng) {
    RegexRule out = rule;
    OuterOr& outer = part_of(out, part);
    const std::vector<std::string>& pool = ctx.pool(part);
    if (pool.empty()) return out;

    const std::string& word = pool[rng.index(pool.size())];
    Chain single;
    single.elements.push_back({{word}});
    if (!contains_chain(outer, single)) {
        outer.alternatives.push_back(std::move(single));
        return out;
    }
    // the word's bare chain exists already: append a fresh two-word chain
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (pool.size() < 2) break;
        const std::vector<std::string> pair = sample_pool_words(pool, 2, rng);
        Chain chain;
        chain.elements.push_back({{pair[0]}});
        chain.elements.push_back({{pair[1]}});
        const std::size_t pick = rng.index(ctx.distance_table.size() + 1);
        chain.gaps.push_back(pick == ctx.distance_table.size() ? Gap{}
                                                               : Gap{ctx.distance_table[pick]});
        if (!contains_chain(outer, chain)) {
            outer.alternatives.push_back(std::move(chain));
            return out;
        }
    }
    return rule;
}

RegexRule o3_remove_or(const RegexRule& rule, Part part, Rng& rng) {
    RegexRule out = rule;
    OuterOr& outer = part_of(out, part);

    // deletion sites: whole alternatives, plus single words of inner ORs
    struct Site {
        bool inner;
        std::size_t alt, elem, word;
    };
    std::vector<Site> sites;
    for (std::size_t a = 0; a < outer.alternatives.size(); ++a) {
        sites.push_back({false, a, 0, 0});
        const Chain& chain = outer.alternatives[a];
        for (std::size_t e = 0; e < chain.elements.size(); ++e) {
            if (!chain.elements[e].is_inner_or()) continue;
            for (std::size_t w = 0; w < chain.elements[e].words.size(); ++w) {
                sites.push_back({true, a, e, w});
            }
        }
    }
    if (sites.empty()) return out;

    const Site site = sites[rng.index(sites.size())];
    if (site.inner) {
        auto& words = outer.alternatives[site.alt].elements[site.elem].words;
        words.erase(words.begin() + static_cast<std::ptrdiff_t>(site.word));
        drop_duplicate_alternatives(outer);
    } else {
        outer.alternatives.erase(outer.alternatives.begin() +
                                 static_cast<std::ptrdiff_t>(site.alt));
    }
    return out;
}

RegexRule o4_add_and(const RegexRule& rule, Part part, const MutationContext& ctx, Rng& rng) {
    RegexRule out = rule;
    OuterOr& outer = part_of(out, part);
    const std::vector<std::string>& pool = ctx.pool(part);
    if (outer.alternatives.empty() || pool.empty()) return out;

    Chain& chain = outer.alternatives[rng.index(outer.alternatives.size())];
    const std::string& word = pool[rng.index(pool.size())];

    if (chain.elements.size() == 1 && rng.chance(0.5)) {
        // construct a new two-element structure with the existing element
        chain.elements.push_back({{word}});
        chain.gaps.emplace_back(std::nullopt);
        drop_duplicate_alternatives(outer);
        return out;
    }
    const std::size_t pos = rng.index(chain.elements.size() + 1);
    chain.elements.insert(chain.elements.begin() + static_cast<std::ptrdiff_t>(pos),
                          ChainElement{{word}});
    const std::size_t gap_pos = pos == 0 ? 0 : pos - 1;
    chain.gaps.insert(chain.gaps.begin() + static_cast<std::ptrdiff_t>(gap_pos), Gap{});
    drop_duplicate_alternatives(outer);
    return out;
}

RegexRule o5_swap(const RegexRule& rule, Part part, Rng& rng) {
    RegexRule out = rule;
    OuterOr& outer = part_of(out, part);
    std::vector<std::size_t> eligible;
    for (std::size_t a = 0; a < outer.alternatives.size(); ++a) {
        if (outer.alternatives[a].elements.size() >= 2) eligible.push_back(a);
    }
    if (eligible.empty()) return out;
    Chain& chain = outer.alternatives[eligible[rng.index(eligible.size())]];
    const std::size_t i = rng.index(chain.elements.size());
    std::size_t j = rng.index(chain.elements.size() - 1);
    if (j >= i) ++j;
    std::swap(chain.elements[i], chain.elements[j]); // gaps stay with positions
    drop_duplicate_alternatives(outer);
    return out;
}

RegexRule o6_distance(const RegexRule& rule, Part part, const MutationContext& ctx, Rng& rng) {
    RegexRule out = rule;
    OuterOr& outer = part_of(out, part);
    std::vector<std::pair<std::size_t, std::size_t>> gap_sites;
    for (std::size_t a = 0; a < outer.alternatives.size(); ++a) {
        for (std::size_t g = 0; g < outer.alternatives[a].gaps.size(); ++g) {
            gap_sites.emplace_back(a, g);
        }
    }
    if (gap_sites.empty()) return out;

    const auto [a, g] = gap_sites[rng.index(gap_sites.size())];
    Gap& gap = outer.alternatives[a].gaps[g];

    std::vector<Gap> options;
    for (int b : ctx.distance_table) {
        if (!gap.has_value() || *gap != b) options.emplace_back(b);
    }
    if (gap.has_value()) options.emplace_back(std::nullopt);
    gap = options[rng.index(options.size())];
    drop_duplicate_alternatives(outer);
    return out;
}

RegexRule o7_remove_and(const RegexRule& rule, Part part, Rng& rng) {
    RegexRule out = rule;
    OuterOr& outer = part_of(out, part);
    std::vector<std::size_t> eligible;
    for (std::size_t a = 0; a < outer.alternatives.size(); ++a) {
        if (outer.alternatives[a].elements.size() >= 2) eligible.push_back(a);
    }
    if (eligible.empty()) return out;
    Chain& chain = outer.alternatives[eligible[rng.index(eligible.size())]];
    const std::size_t pos = rng.index(chain.elements.size());
    chain.elements.erase(chain.elements.begin() + static_cast<std::ptrdiff_t>(pos));
    if (pos == 0) {
        chain.gaps.erase(chain.gaps.begin());
    } else if (pos == chain.elements.size()) { // removed the tail
        chain.gaps.pop_back();
    } else {
        // interior removal: the two adjacent gaps merge to unrestricted
        chain.gaps.erase(chain.gaps.begin() + static_cast<std::ptrdiff_t>(pos));
        chain.gaps[pos - 1] = std::nullopt;
    }
    drop_duplicate_alternatives(outer);
    return out;
}

RegexRule apply_operator(Operator op, const RegexRule& rule, Part part,
                         const MutationContext& ctx, Rng& rng) {
    switch (op) {
    case Operator::AddInnerOr: return o1_add_inner_or(rule, part, ctx, rng);
    case Operator::AddOuterOr: return o2_add_outer_or(rule, part, ctx, rng);
    case Operator::RemoveOr: return o3_remove_or(rule, part, rng);
    case Operator::AddAnd: return o4_add_and(rule, part, ctx, rng);
    case Operator::Swap: return o5_swap(rule, part, rng);
    case Operator::Distance: return o6_distance(rule, part, ctx, rng);
    case Operator::RemoveAnd: return o7_remove_and(rule, part, rng);
    }
    throw ConfigError("unknown operator");
}

MutationOutcome mutate_detailed(const Classifier& classifier, const MutationContext& ctx,
                                Rng& rng) {
    if (classifier.rules.empty()) throw TrainError("mutate: classifier has no rules");
    const std::size_t rule_index = rng.index(classifier.rules.size());
    const RegexRule& rule = classifier.rules[rule_index];

    for (int attempt = 0; attempt < 16; ++attempt) {
        const Part part = rng.chance(ctx.positive_part_prob) ? Part::Positive : Part::Negative;
        const std::vector<Operator> ops = applicable_operators(rule, part, ctx);
        if (ops.empty()) continue;
        const Operator op = ops[rng.index(ops.size())];
        RegexRule mutated = apply_operator(op, rule, part, ctx, rng);
        if (mutated == rule) continue;
        MutationOutcome outcome;
        outcome.result = classifier;
        outcome.result.rules[rule_index] = std::move(mutated);
        outcome.rule_index = rule_index;
        outcome.part = part;
        outcome.op = op;
        return outcome;
    }

    // last resort: grow the positive part
    if (operator_applicable(Operator::AddOuterOr, rule, Part::Positive, ctx)) {
        RegexRule mutated = o2_add_outer_or(rule, Part::Positive, ctx, rng);
        if (mutated != rule) {
            MutationOutcome outcome;
            outcome.result = classifier;
            outcome.result.rules[rule_index] = std::move(mutated);
            outcome.rule_index = rule_index;
            outcome.part = Part::Positive;
            outcome.op = Operator::AddOuterOr;
            return outcome;
        }
    }
    throw TrainError("mutate: no applicable operator can change the solution");
}

Classifier mutate(const Classifier& classifier, const MutationContext& ctx, Rng& rng) {
    return mutate_detailed(classifier, ctx, rng).result;
}

} // namespace psaw
