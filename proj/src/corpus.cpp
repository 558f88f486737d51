#include "psaw/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "psaw/errors.hpp"

namespace psaw {

namespace {

bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::size_t utf8_len(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xe) return 3;
    if ((lead >> 3) == 0x1e) return 4;
    return 1; // invalid byte, treat as a single unit
}

} // namespace

std::vector<std::string> tokenize(const std::string& text, const TokenizerConfig& config) {
    std::vector<std::string> out;
    if (config.mode == TokenizerMode::Whitespace) {
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && is_space_byte(text[i])) ++i;
            std::size_t start = i;
            while (i < text.size() && !is_space_byte(text[i])) ++i;
            if (i > start) {
                std::string tok = text.substr(start, i - start);
                if (!config.stop_words.count(tok)) out.push_back(std::move(tok));
            }
        }
    } else {
        std::size_t i = 0;
        while (i < text.size()) {
            std::size_t n = utf8_len(static_cast<unsigned char>(text[i]));
            if (i + n > text.size()) n = 1;
            std::string tok = text.substr(i, n);
            i += n;
            if (n == 1 && is_space_byte(tok[0])) continue;
            if (!config.stop_words.count(tok)) out.push_back(std::move(tok));
        }
    }
    return out;
}

namespace {

std::vector<std::string> split_tab(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

Document parse_tsv_record(const std::string& line, int line_no, const TokenizerConfig& config) {
    std::vector<std::string> fields = split_tab(line);
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
        throw DataError("malformed TSV record at line " + std::to_string(line_no) +
                        ": expected label<TAB>text");
    }
    Document doc;
    doc.label = fields[0];
    doc.text = fields[1];
    if (fields.size() >= 3 && !fields[2].empty()) {
        TokenizerConfig pre; // pre-tokenized column: plain whitespace split
        doc.tokens = tokenize(fields[2], pre);
    } else {
        doc.tokens = tokenize(doc.text, config);
    }
    return doc;
}

Document parse_jsonl_record(const std::string& line, int line_no, const TokenizerConfig& config) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed JSONL record at line " + std::to_string(line_no) + ": " +
                        e.what());
    }
    if (!obj.is_object() || !obj.contains("label") || !obj.contains("text") ||
        !obj["label"].is_string() || !obj["text"].is_string()) {
        throw DataError("malformed JSONL record at line " + std::to_string(line_no) +
                        ": expected object with string fields 'label' and 'text'");
    }
    Document doc;
    doc.label = obj["label"].get<std::string>();
    doc.text = obj["text"].get<std::string>();
    if (doc.label.empty() || doc.text.empty()) {
        throw DataError("malformed JSONL record at line " + std::to_string(line_no) +
                        ": empty label or text");
    }
    if (obj.contains("tokens")) {
        if (!obj["tokens"].is_array()) {
            throw DataError("malformed JSONL record at line " + std::to_string(line_no) +
                            ": 'tokens' must be an array of strings");
        }
        for (const auto& t : obj["tokens"]) {
            if (!t.is_string()) {
                throw DataError("malformed JSONL record at line " + std::to_string(line_no) +
                                ": 'tokens' must be an array of strings");
            }
            doc.tokens.push_back(t.get<std::string>());
        }
    } else {
        doc.tokens = tokenize(doc.text, config);
    }
    return doc;
}

} // namespace

LabeledCorpus load_corpus(const std::string& path, CorpusFormat format,
                          const TokenizerConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file: " + path);
    LabeledCorpus corpus;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Document doc = format == CorpusFormat::Tsv ? parse_tsv_record(line, line_no, config)
                                                   : parse_jsonl_record(line, line_no, config);
        doc.id = static_cast<int>(corpus.documents.size());
        corpus.classes.insert(doc.label);
        corpus.documents.push_back(std::move(doc));
    }
    if (corpus.documents.empty()) throw DataError("corpus file has no records: " + path);
    return corpus;
}

void save_corpus(const LabeledCorpus& corpus, const std::string& path, CorpusFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write corpus file: " + path);
    for (const Document& doc : corpus.documents) {
        if (format == CorpusFormat::Tsv) {
            out << doc.label << '\t' << doc.text << '\t';
            for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
                if (i) out << ' ';
                out << doc.tokens[i];
            }
            out << '\n';
        } else {
            nlohmann::json obj;
            obj["label"] = doc.label;
            obj["text"] = doc.text;
            obj["tokens"] = doc.tokens;
            out << obj.dump() << '\n';
        }
    }
}

std::set<std::string> load_stop_words(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open stop-word file: " + path);
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) words.insert(line);
    }
    return words;
}

BinaryDataset split_binary(const LabeledCorpus& corpus, const std::string& target_class) {
    if (!corpus.classes.count(target_class)) {
        throw DataError("unknown class: " + target_class);
    }
    BinaryDataset ds;
    ds.target_class = target_class;
    for (const Document& doc : corpus.documents) {
        (doc.label == target_class ? ds.positive : ds.negative).push_back(doc);
    }
    return ds;
}

FrequencyTable word_frequencies(const std::vector<Document>& docs) {
    FrequencyTable table;
    for (const Document& doc : docs) {
        for (const std::string& tok : doc.tokens) {
            ++table.counts[tok];
            ++table.total_tokens;
        }
    }
    return table;
}

namespace {

std::int64_t count_of(const FrequencyTable& t, const std::string& w) {
    auto it = t.counts.find(w);
    return it == t.counts.end() ? 0 : it->second;
}

// Add-one smoothed relative frequency over the union vocabulary.
double smoothed(const FrequencyTable& t, const std::string& w, std::size_t union_vocab) {
    return static_cast<double>(count_of(t, w) + 1) /
           static_cast<double>(t.total_tokens + static_cast<std::int64_t>(union_vocab));
}

std::set<std::string> union_vocabulary(const FrequencyTable& a, const FrequencyTable& b) {
    std::set<std::string> vocab;
    for (const auto& [w, c] : a.counts) vocab.insert(w);
    for (const auto& [w, c] : b.counts) vocab.insert(w);
    return vocab;
}

} // namespace

std::vector<std::string> ratio_keywords(const FrequencyTable& pos, const FrequencyTable& neg,
                                        double td_f) {
    if (td_f <= 0) throw ConfigError("td_f must be positive");
    const std::set<std::string> vocab = union_vocabulary(pos, neg);
    std::vector<std::string> keywords;
    for (const auto& [w, c] : pos.counts) {
        if (smoothed(pos, w, vocab.size()) > td_f * smoothed(neg, w, vocab.size())) {
            keywords.push_back(w);
        }
    }
    std::sort(keywords.begin(), keywords.end(), [&](const std::string& a, const std::string& b) {
        const std::int64_t ca = count_of(pos, a), cb = count_of(pos, b);
        if (ca != cb) return ca > cb;
        return a < b;
    });
    return keywords;
}

std::vector<std::string> ratio_ranked_words(const FrequencyTable& a, const FrequencyTable& b,
                                            std::size_t limit) {
    const std::set<std::string> vocab = union_vocabulary(a, b);
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(vocab.size());
    for (const std::string& w : vocab) {
        scored.emplace_back(w, smoothed(a, w, vocab.size()) / smoothed(b, w, vocab.size()));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
    });
    if (scored.size() > limit) scored.resize(limit);
    std::vector<std::string> out;
    out.reserve(scored.size());
    for (auto& [w, s] : scored) out.push_back(std::move(w));
    return out;
}

InvertedIndex build_inverted_index(const std::vector<Document>& docs,
                                   const std::set<std::string>& vocabulary) {
    InvertedIndex index;
    for (const std::string& w : vocabulary) {
        std::vector<int>& postings = index.postings[w];
        for (const Document& doc : docs) {
            if (doc.text.find(w) != std::string::npos) postings.push_back(doc.id);
        }
        std::sort(postings.begin(), postings.end());
    }
    return index;
}

// ---- synthetic corpora ------------------------------------------------

SyntheticSpec load_synthetic_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open synthetic spec: " + path);
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed synthetic spec: ") + e.what());
    }
    SyntheticSpec spec;
    try {
        if (obj.contains("vocabulary")) {
            if (obj["vocabulary"].is_array()) {
                spec.vocabulary = obj["vocabulary"].get<std::vector<std::string>>();
            } else {
                const int count = obj["vocabulary"].at("count").get<int>();
                const std::string prefix = obj["vocabulary"].value("prefix", "bg");
                for (int i = 0; i < count; ++i) {
                    spec.vocabulary.push_back(prefix + std::to_string(i));
                }
            }
        }
        spec.doc_count = obj.at("doc_count").get<int>();
        if (obj.contains("tokens_per_doc")) {
            spec.min_tokens = obj["tokens_per_doc"].at(0).get<int>();
            spec.max_tokens = obj["tokens_per_doc"].at(1).get<int>();
        }
        spec.label_noise = obj.value("label_noise", 0.0);
        for (const auto& c : obj.at("classes")) {
            PlantedClass pc;
            pc.name = c.at("name").get<std::string>();
            if (c.contains("chain")) {
                pc.chain = c["chain"].get<std::vector<std::vector<std::string>>>();
            }
            if (c.contains("gaps")) {
                for (const auto& g : c["gaps"]) {
                    if (g.is_null()) pc.gaps.emplace_back(std::nullopt);
                    else pc.gaps.emplace_back(g.get<int>());
                }
            }
            if (c.contains("forbidden")) {
                pc.forbidden = c["forbidden"].get<std::vector<std::string>>();
            }
            pc.weight = c.value("weight", 1.0);
            pc.distractor_rate = c.value("distractor_rate", 0.0);
            pc.filter_rate = c.value("filter_rate", 0.0);
            spec.classes.push_back(std::move(pc));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed synthetic spec: ") + e.what());
    }
    return spec;
}

namespace {

void validate_spec(const SyntheticSpec& spec) {
    if (spec.doc_count <= 0) throw ConfigError("synthetic spec: doc_count must be positive");
    if (spec.classes.empty()) throw ConfigError("synthetic spec: no classes");
    if (spec.min_tokens < 1 || spec.max_tokens < spec.min_tokens) {
        throw ConfigError("synthetic spec: bad tokens_per_doc range");
    }
    std::set<std::string> vocab(spec.vocabulary.begin(), spec.vocabulary.end());
    for (const PlantedClass& pc : spec.classes) {
        if (!pc.chain.empty() && pc.gaps.size() != pc.chain.size() - 1 && !pc.gaps.empty()) {
            throw ConfigError("synthetic spec: class " + pc.name +
                              " gaps must have chain-1 entries");
        }
        for (const auto& group : pc.chain) {
            if (group.empty()) {
                throw ConfigError("synthetic spec: class " + pc.name + " has an empty group");
            }
            for (const std::string& w : group) {
                if (!vocab.count(w)) {
                    throw ConfigError("synthetic spec: pattern word '" + w +
                                      "' not in vocabulary (class " + pc.name + ")");
                }
            }
        }
        for (const std::string& w : pc.forbidden) {
            if (!vocab.count(w)) {
                throw ConfigError("synthetic spec: forbidden word '" + w +
                                  "' not in vocabulary (class " + pc.name + ")");
            }
        }
    }
}

// Words reserved for planted signals; never drawn as background filler.
std::set<std::string> reserved_words(const SyntheticSpec& spec) {
    std::set<std::string> reserved;
    for (const PlantedClass& pc : spec.classes) {
        for (const auto& group : pc.chain) reserved.insert(group.begin(), group.end());
        reserved.insert(pc.forbidden.begin(), pc.forbidden.end());
    }
    return reserved;
}

// Insert one word from each chain group into `tokens`, in order. Bounded
// gaps place consecutive slots (one joining space when rendered); an
// unrestricted gap allows any forward jump.
void plant_chain(std::vector<std::string>& tokens, const PlantedClass& pc, Rng& rng) {
    if (pc.chain.empty()) return;
    const std::size_t k = pc.chain.size();
    bool any_bounded = false;
    for (const auto& g : pc.gaps) {
        if (g.has_value()) any_bounded = true;
    }
    std::vector<std::size_t> slots;
    if (any_bounded || tokens.size() < k) {
        // consecutive block, uniform start
        const std::size_t start = rng.index(tokens.size() + 1);
        for (std::size_t i = 0; i < k; ++i) slots.push_back(start + i);
    } else {
        slots = rng.sample_indices(tokens.size() + 1, k);
        std::sort(slots.begin(), slots.end());
        for (std::size_t i = 0; i < k; ++i) slots[i] += i; // account for prior insertions
    }
    for (std::size_t i = 0; i < k; ++i) {
        const std::string& w = pc.chain[i][rng.index(pc.chain[i].size())];
        tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(slots[i]), w);
    }
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string text;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) text += ' ';
        text += tokens[i];
    }
    return text;
}

} // namespace

LabeledCorpus generate_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed) {
    validate_spec(spec);
    Rng rng(Rng::mix(seed, 0x5eedc0de));

    const std::set<std::string> reserved = reserved_words(spec);
    std::vector<std::string> background;
    for (const std::string& w : spec.vocabulary) {
        if (!reserved.count(w)) background.push_back(w);
    }
    if (background.empty()) {
        throw ConfigError("synthetic spec: vocabulary has no background words");
    }

    double total_weight = 0;
    for (const PlantedClass& pc : spec.classes) total_weight += pc.weight;
    if (total_weight <= 0) throw ConfigError("synthetic spec: class weights must sum > 0");

    LabeledCorpus corpus;
    for (int i = 0; i < spec.doc_count; ++i) {
        // weighted class choice
        double r = rng.unit() * total_weight;
        std::size_t ci = 0;
        for (; ci + 1 < spec.classes.size(); ++ci) {
            r -= spec.classes[ci].weight;
            if (r < 0) break;
        }
        const PlantedClass& pc = spec.classes[ci];

        const std::size_t len =
            static_cast<std::size_t>(spec.min_tokens) +
            rng.index(static_cast<std::size_t>(spec.max_tokens - spec.min_tokens + 1));
        std::vector<std::string> tokens;
        tokens.reserve(len + 4);
        for (std::size_t t = 0; t < len; ++t) tokens.push_back(background[rng.index(background.size())]);

        plant_chain(tokens, pc, rng);

        // contamination from other classes
        for (std::size_t oi = 0; oi < spec.classes.size(); ++oi) {
            if (oi == ci) continue;
            const PlantedClass& other = spec.classes[oi];
            if (other.chain.empty()) continue;
            if (other.distractor_rate > 0 && rng.chance(other.distractor_rate)) {
                const auto& group = other.chain[rng.index(other.chain.size())];
                const std::string& w = group[rng.index(group.size())];
                tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(rng.index(tokens.size() + 1)), w);
            }
            if (other.filter_rate > 0 && !other.forbidden.empty() &&
                rng.chance(other.filter_rate)) {
                plant_chain(tokens, other, rng);
                const std::string& fw = other.forbidden[rng.index(other.forbidden.size())];
                tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(rng.index(tokens.size() + 1)), fw);
            }
        }

        Document doc;
        doc.id = i;
        doc.label = pc.name;
        if (spec.label_noise > 0 && spec.classes.size() > 1 && rng.chance(spec.label_noise)) {
            std::size_t other = rng.index(spec.classes.size() - 1);
            if (other >= ci) ++other;
            doc.label = spec.classes[other].name;
        }
        doc.tokens = tokens;
        doc.text = join_tokens(tokens);
        corpus.documents.push_back(std::move(doc));
    }
    for (const PlantedClass& pc : spec.classes) corpus.classes.insert(pc.name);
    return corpus;
}

} // namespace psaw
