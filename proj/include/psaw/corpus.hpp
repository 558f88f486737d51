#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "psaw/rng.hpp"

namespace psaw {

struct Document {
    int id = 0;
    std::string text;
    std::vector<std::string> tokens;
    std::string label;
};

struct LabeledCorpus {
    std::vector<Document> documents;
    std::set<std::string> classes;
};

// One-vs-rest view of a corpus for a target class.
struct BinaryDataset {
    std::vector<Document> positive;
    std::vector<Document> negative;
    std::string target_class;
};

struct FrequencyTable {
    std::unordered_map<std::string, std::int64_t> counts;
    std::int64_t total_tokens = 0;
};

// postings[w] holds the sorted ids of documents whose raw text contains w
// as a substring. Sound as a prefilter for substring-based rule matching.
struct InvertedIndex {
    std::map<std::string, std::vector<int>> postings;
};

enum class TokenizerMode { Whitespace, Character };

struct TokenizerConfig {
    TokenizerMode mode = TokenizerMode::Whitespace;
    std::set<std::string> stop_words;
};

enum class CorpusFormat { Tsv, Jsonl };

std::vector<std::string> tokenize(const std::string& text, const TokenizerConfig& config);

// TSV: label<TAB>text[<TAB>space-joined tokens]. JSONL: {"label","text","tokens"?}.
// Records without a tokens field are tokenized with `config`.
LabeledCorpus load_corpus(const std::string& path, CorpusFormat format,
                          const TokenizerConfig& config = {});
void save_corpus(const LabeledCorpus& corpus, const std::string& path, CorpusFormat format);

// One word per line, UTF-8.
std::set<std::string> load_stop_words(const std::string& path);

BinaryDataset split_binary(const LabeledCorpus& corpus, const std::string& target_class);

FrequencyTable word_frequencies(const std::vector<Document>& docs);

// Words whose add-one-smoothed relative frequency in `pos` exceeds
// td_f times the one in `neg`, sorted by descending positive count
// (ties broken lexicographically).
std::vector<std::string> ratio_keywords(const FrequencyTable& pos, const FrequencyTable& neg,
                                        double td_f);

// All words of the union vocabulary ranked by descending smoothed
// frequency ratio a/b (ties lexicographic), truncated to `limit`.
// Feeds the operator word pools.
std::vector<std::string> ratio_ranked_words(const FrequencyTable& a, const FrequencyTable& b,
                                            std::size_t limit);

InvertedIndex build_inverted_index(const std::vector<Document>& docs,
                                   const std::set<std::string>& vocabulary);

// ---- synthetic corpora ------------------------------------------------

// A planted class pattern: documents of the class contain one word from
// each chain group, in order, honoring the gap bounds; they never contain
// the class's forbidden words. Documents of *other* classes receive, at the
// given rates, either a single stray chain word (distractor) or the full
// chain together with a forbidden word (filter case).
struct PlantedClass {
    std::string name;
    std::vector<std::vector<std::string>> chain;
    std::vector<std::optional<int>> gaps; // size max(0, |chain|-1); nullopt = anywhere after
    std::vector<std::string> forbidden;
    double weight = 1.0;
    double distractor_rate = 0.0;
    double filter_rate = 0.0;
};

struct SyntheticSpec {
    std::vector<std::string> vocabulary; // background + all pattern/forbidden words
    std::vector<PlantedClass> classes;
    int doc_count = 0;
    int min_tokens = 5;
    int max_tokens = 12;
    double label_noise = 0.0;
};

SyntheticSpec load_synthetic_spec(const std::string& path);

// Deterministic for a fixed (spec, seed).
LabeledCorpus generate_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed);

} // namespace psaw
