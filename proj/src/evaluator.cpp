#include "psaw/evaluator.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <thread>

#include "psaw/errors.hpp"

namespace psaw {

EvalMetrics metrics_from_counts(const ConfusionCounts& counts, double beta) {
    if (beta < 0) throw ConfigError("beta must be non-negative");
    if (counts.positives_total == 0) {
        throw ConfigError("metrics_from_counts: dataset has no positive documents");
    }
    EvalMetrics m;
    m.counts = counts;
    m.beta = beta;
    const double tm = static_cast<double>(counts.true_matches);
    const double fm = static_cast<double>(counts.false_matches);
    m.precision = tm + fm == 0 ? 0.0 : tm / (tm + fm);
    m.recall = tm / static_cast<double>(counts.positives_total);
    const double b2 = beta * beta;
    const double denom = b2 * m.precision + m.recall;
    m.f_beta = denom == 0 ? 0.0 : (1 + b2) * m.precision * m.recall / denom;
    return m;
}

ConfusionCounts confusion_counts(const Classifier& classifier, const BinaryDataset& dataset,
                                 const InvertedIndex* index) {
    ConfusionCounts counts;
    counts.positives_total = dataset.positive.size();
    if (index == nullptr) {
        for (const Document& doc : dataset.positive) {
            if (match_classifier(classifier, doc.text)) ++counts.true_matches;
        }
        for (const Document& doc : dataset.negative) {
            if (match_classifier(classifier, doc.text)) ++counts.false_matches;
        }
        return counts;
    }

    // candidate ids per rule: union over positive alternatives of the
    // intersection over elements of the element's posting union
    std::vector<int> all_ids;
    all_ids.reserve(dataset.positive.size() + dataset.negative.size());
    for (const Document& doc : dataset.positive) all_ids.push_back(doc.id);
    for (const Document& doc : dataset.negative) all_ids.push_back(doc.id);
    std::sort(all_ids.begin(), all_ids.end());

    auto element_ids = [&](const ChainElement& elem) -> std::optional<std::vector<int>> {
        std::vector<int> merged;
        for (const std::string& w : elem.words) {
            auto it = index->postings.find(w);
            if (it == index->postings.end()) return std::nullopt; // unknown word: no constraint
            std::vector<int> next;
            std::set_union(merged.begin(), merged.end(), it->second.begin(), it->second.end(),
                           std::back_inserter(next));
            merged = std::move(next);
        }
        return merged;
    };

    std::vector<int> candidates;
    for (const RegexRule& rule : classifier.rules) {
        for (const Chain& chain : rule.positive.alternatives) {
            std::optional<std::vector<int>> chain_ids;
            for (const ChainElement& elem : chain.elements) {
                auto ids = element_ids(elem);
                if (!ids.has_value()) continue;
                if (!chain_ids.has_value()) {
                    chain_ids = std::move(ids);
                } else {
                    std::vector<int> next;
                    std::set_intersection(chain_ids->begin(), chain_ids->end(), ids->begin(),
                                          ids->end(), std::back_inserter(next));
                    chain_ids = std::move(next);
                }
            }
            const std::vector<int>& add = chain_ids.has_value() ? *chain_ids : all_ids;
            std::vector<int> merged;
            std::set_union(candidates.begin(), candidates.end(), add.begin(), add.end(),
                           std::back_inserter(merged));
            candidates = std::move(merged);
        }
    }

    auto id_in_candidates = [&](int id) {
        return std::binary_search(candidates.begin(), candidates.end(), id);
    };
    for (const Document& doc : dataset.positive) {
        if (id_in_candidates(doc.id) && match_classifier(classifier, doc.text)) {
            ++counts.true_matches;
        }
    }
    for (const Document& doc : dataset.negative) {
        if (id_in_candidates(doc.id) && match_classifier(classifier, doc.text)) {
            ++counts.false_matches;
        }
    }
    return counts;
}

// ---- Evaluator ------------------------------------------------------------

namespace {

inline void set_bit(std::vector<std::uint64_t>& bits, std::size_t i) {
    bits[i >> 6] |= std::uint64_t{1} << (i & 63);
}

inline bool test_bit(const std::vector<std::uint64_t>& bits, std::size_t i) {
    return (bits[i >> 6] >> (i & 63)) & 1;
}

std::size_t count_range(const std::vector<std::uint64_t>& bits, std::size_t limit) {
    std::size_t count = 0;
    const std::size_t full_words = limit >> 6;
    for (std::size_t w = 0; w < full_words; ++w) count += std::popcount(bits[w]);
    const std::size_t rem = limit & 63;
    if (rem) count += std::popcount(bits[full_words] & ((std::uint64_t{1} << rem) - 1));
    return count;
}

} // namespace

Evaluator::Evaluator(const BinaryDataset& dataset, EvalOptions options)
    : positive_count_(dataset.positive.size()), options_(options) {
    if (options_.workers < 1) options_.workers = 1;
    docs_.reserve(dataset.positive.size() + dataset.negative.size());
    docs_.insert(docs_.end(), dataset.positive.begin(), dataset.positive.end());
    docs_.insert(docs_.end(), dataset.negative.begin(), dataset.negative.end());
}

const Evaluator::Bits& Evaluator::word_postings(const std::string& word) const {
    auto it = posting_cache_.find(word);
    if (it != posting_cache_.end()) return it->second;
    Bits bits((docs_.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        if (docs_[i].text.find(word) != std::string::npos) set_bit(bits, i);
    }
    return posting_cache_.emplace(word, std::move(bits)).first->second;
}

Evaluator::Bits Evaluator::positive_candidates(const RegexRule& rule) const {
    const std::size_t words = (docs_.size() + 63) / 64;
    Bits candidates(words, 0);
    for (const Chain& chain : rule.positive.alternatives) {
        Bits chain_bits(words, ~std::uint64_t{0});
        for (const ChainElement& elem : chain.elements) {
            Bits elem_bits(words, 0);
            for (const std::string& w : elem.words) {
                const Bits& posting = word_postings(w);
                for (std::size_t i = 0; i < words; ++i) elem_bits[i] |= posting[i];
            }
            for (std::size_t i = 0; i < words; ++i) chain_bits[i] &= elem_bits[i];
        }
        for (std::size_t i = 0; i < words; ++i) candidates[i] |= chain_bits[i];
    }
    return candidates;
}

void Evaluator::confirm_rule(const RegexRule& rule, const std::vector<std::uint32_t>& slots,
                             Bits& out) const {
    const int workers = std::min<int>(options_.workers, 1 + static_cast<int>(slots.size()) / 256);
    if (workers <= 1) {
        for (std::uint32_t slot : slots) {
            if (match_rule(rule, docs_[slot].text)) set_bit(out, slot);
        }
        return;
    }
    std::vector<std::vector<std::uint32_t>> matched(static_cast<std::size_t>(workers));
    std::vector<std::thread> threads;
    const std::size_t chunk = (slots.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            const std::size_t lo = static_cast<std::size_t>(w) * chunk;
            const std::size_t hi = std::min(slots.size(), lo + chunk);
            for (std::size_t i = lo; i < hi; ++i) {
                if (match_rule(rule, docs_[slots[i]].text)) {
                    matched[static_cast<std::size_t>(w)].push_back(slots[i]);
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    for (const auto& part : matched) {
        for (std::uint32_t slot : part) set_bit(out, slot);
    }
}

const Evaluator::Bits& Evaluator::rule_matches(const RegexRule& rule) const {
    const std::string key = to_canonical(rule);
    auto it = rule_cache_.find(key);
    if (it != rule_cache_.end()) return it->second;

    Bits bits((docs_.size() + 63) / 64, 0);
    std::vector<std::uint32_t> slots;
    if (options_.use_prefilter) {
        const Bits candidates = positive_candidates(rule);
        for (std::size_t i = 0; i < docs_.size(); ++i) {
            if (test_bit(candidates, i)) slots.push_back(static_cast<std::uint32_t>(i));
        }
    } else {
        slots.resize(docs_.size());
        for (std::size_t i = 0; i < docs_.size(); ++i) slots[i] = static_cast<std::uint32_t>(i);
    }
    confirm_rule(rule, slots, bits);
    return rule_cache_.emplace(key, std::move(bits)).first->second;
}

ConfusionCounts Evaluator::confusion(const Classifier& classifier) const {
    const std::size_t words = (docs_.size() + 63) / 64;
    Bits any(words, 0);
    for (const RegexRule& rule : classifier.rules) {
        const Bits& bits = rule_matches(rule);
        for (std::size_t i = 0; i < words; ++i) any[i] |= bits[i];
    }
    ConfusionCounts counts;
    counts.positives_total = positive_count_;
    counts.true_matches = count_range(any, positive_count_);
    std::size_t total = count_range(any, docs_.size());
    counts.false_matches = total - counts.true_matches;
    return counts;
}

EvalMetrics Evaluator::evaluate(const Classifier& classifier, double beta) const {
    return metrics_from_counts(confusion(classifier), beta);
}

double Evaluator::objective(const Classifier& classifier, double beta) const {
    return evaluate(classifier, beta).f_beta;
}

std::string format_metrics_line(const std::string& cls, const EvalMetrics& m) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s\tprecision=%.4f\trecall=%.4f\tf%.2g=%.4f\ttm=%zu\tfm=%zu\tpos=%zu",
                  cls.c_str(), m.precision, m.recall, m.beta, m.f_beta, m.counts.true_matches,
                  m.counts.false_matches, m.counts.positives_total);
    return std::string(buf);
}

} // namespace psaw
