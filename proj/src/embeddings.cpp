#include "psaw/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <zlib.h>

#include "psaw/errors.hpp"

namespace psaw {

namespace {

// gzread handles both gzip and plain files.
std::string read_whole_file(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw DataError("cannot open embedding file: " + path);
    std::string content;
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) content.append(buf, static_cast<std::size_t>(n));
    const bool bad = n < 0;
    gzclose(f);
    if (bad) throw DataError("error while reading embedding file: " + path);
    return content;
}

double norm(const std::vector<float>& v) {
    double s = 0;
    for (float x : v) s += static_cast<double>(x) * x;
    return std::sqrt(s);
}

} // namespace

EmbeddingTable load_embeddings(const std::string& path, std::vector<std::string>* warnings) {
    const std::string content = read_whole_file(path);
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty embedding file: " + path);

    std::istringstream header(line);
    long long vocab_size = 0;
    int dimension = 0;
    if (!(header >> vocab_size >> dimension) || vocab_size <= 0 || dimension <= 0) {
        throw DataError("bad embedding header (want 'vocab dimension') in " + path);
    }

    EmbeddingTable table;
    table.dimension = dimension;
    table.vectors.reserve(static_cast<std::size_t>(vocab_size));
    long long rows = 0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        std::istringstream row(line);
        std::string word;
        row >> word;
        std::vector<float> vec(static_cast<std::size_t>(dimension));
        for (int d = 0; d < dimension; ++d) {
            if (!(row >> vec[static_cast<std::size_t>(d)])) {
                throw DataError("embedding row arity mismatch at line " +
                                std::to_string(line_no) + " of " + path + " (want " +
                                std::to_string(dimension) + " floats)");
            }
        }
        float extra;
        if (row >> extra) {
            throw DataError("embedding row arity mismatch at line " + std::to_string(line_no) +
                            " of " + path + " (more than " + std::to_string(dimension) +
                            " floats)");
        }
        if (norm(vec) == 0.0) {
            throw DataError("zero vector for word '" + word + "' at line " +
                            std::to_string(line_no) + " of " + path);
        }
        if (table.vectors.count(word) && warnings) {
            warnings->push_back("duplicate word '" + word + "' at line " +
                                std::to_string(line_no) + "; keeping the last row");
        }
        table.vectors[word] = std::move(vec);
        ++rows;
    }
    if (rows != vocab_size) {
        throw DataError("embedding header declares " + std::to_string(vocab_size) +
                        " words but file has " + std::to_string(rows) + " rows: " + path);
    }
    return table;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write embedding file: " + path);
    out << table.vectors.size() << ' ' << table.dimension << '\n';
    std::map<std::string, const std::vector<float>*> sorted;
    for (const auto& [w, v] : table.vectors) sorted[w] = &v;
    char buf[64];
    for (const auto& [w, v] : sorted) {
        out << w;
        for (float x : *v) {
            std::snprintf(buf, sizeof(buf), " %.8g", static_cast<double>(x));
            out << buf;
        }
        out << '\n';
    }
}

double cosine_similarity(const EmbeddingTable& table, const std::string& w1,
                         const std::string& w2) {
    auto it1 = table.vectors.find(w1);
    if (it1 == table.vectors.end()) throw OovError(w1);
    auto it2 = table.vectors.find(w2);
    if (it2 == table.vectors.end()) throw OovError(w2);
    const std::vector<float>& a = it1->second;
    const std::vector<float>& b = it2->second;
    double dot = 0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += static_cast<double>(a[i]) * b[i];
    return dot / (norm(a) * norm(b));
}

std::string similarity_weighted_choice(const EmbeddingTable& table, const std::string& anchor,
                                       const std::vector<std::string>& candidates, Rng& rng) {
    if (candidates.empty()) throw ConfigError("similarity_weighted_choice: no candidates");
    std::vector<double> weights(candidates.size(), kSimilarityFloor);
    if (table.contains(anchor)) {
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (!table.contains(candidates[i])) continue;
            weights[i] = std::max(cosine_similarity(table, anchor, candidates[i]),
                                  kSimilarityFloor);
        }
    }
    double total = 0;
    for (double w : weights) total += w;
    double r = rng.unit() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        r -= weights[i];
        if (r < 0) return candidates[i];
    }
    return candidates.back();
}

std::vector<double> document_vector(const EmbeddingTable& table, const Document& doc,
                                    bool* all_oov) {
    std::vector<double> mean(static_cast<std::size_t>(table.dimension), 0.0);
    std::size_t found = 0;
    for (const std::string& tok : doc.tokens) {
        auto it = table.vectors.find(tok);
        if (it == table.vectors.end()) continue;
        ++found;
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += it->second[d];
    }
    if (found > 0) {
        for (double& x : mean) x /= static_cast<double>(found);
    }
    if (all_oov) *all_oov = found == 0;
    return mean;
}

EmbeddingTable build_fallback_embeddings(const LabeledCorpus& corpus, int window,
                                         int dimension_cap) {
    if (window < 1) throw ConfigError("fallback embeddings: window must be >= 1");
    if (dimension_cap < 1) throw ConfigError("fallback embeddings: dimension cap must be >= 1");
    if (corpus.documents.empty()) throw DataError("fallback embeddings: empty corpus");

    // ordered maps keep everything deterministic
    std::map<std::string, std::int64_t> word_count;
    std::map<std::pair<std::string, std::string>, std::int64_t> pair_count;
    std::int64_t pair_total = 0;
    for (const Document& doc : corpus.documents) {
        const auto& toks = doc.tokens;
        for (std::size_t i = 0; i < toks.size(); ++i) {
            ++word_count[toks[i]];
            const std::size_t hi = std::min(toks.size(), i + 1 + static_cast<std::size_t>(window));
            for (std::size_t j = i + 1; j < hi; ++j) {
                ++pair_count[{toks[i], toks[j]}];
                ++pair_count[{toks[j], toks[i]}];
                pair_total += 2;
            }
        }
    }
    if (pair_total == 0) throw DataError("fallback embeddings: corpus has no co-occurrences");

    // context axes: most frequent words, ties lexicographic
    std::vector<std::pair<std::string, std::int64_t>> by_freq(word_count.begin(),
                                                              word_count.end());
    std::sort(by_freq.begin(), by_freq.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (by_freq.size() > static_cast<std::size_t>(dimension_cap)) {
        by_freq.resize(static_cast<std::size_t>(dimension_cap));
    }
    std::map<std::string, std::size_t> context_axis;
    for (std::size_t i = 0; i < by_freq.size(); ++i) context_axis[by_freq[i].first] = i;

    // marginals over co-occurrence events
    std::map<std::string, std::int64_t> margin;
    for (const auto& [pair, c] : pair_count) margin[pair.first] += c;

    EmbeddingTable table;
    table.dimension = static_cast<int>(by_freq.size());
    for (const auto& [word, wcount] : word_count) {
        std::vector<float> vec(by_freq.size(), 0.0f);
        bool nonzero = false;
        for (const auto& [ctx, axis] : context_axis) {
            auto it = pair_count.find({word, ctx});
            if (it == pair_count.end()) continue;
            const double p_wc = static_cast<double>(it->second) / pair_total;
            const double p_w = static_cast<double>(margin[word]) / pair_total;
            const double p_c = static_cast<double>(margin[ctx]) / pair_total;
            const double pmi = std::log(p_wc / (p_w * p_c));
            if (pmi > 0) {
                vec[axis] = static_cast<float>(pmi);
                nonzero = true;
            }
        }
        if (nonzero) table.vectors[word] = std::move(vec);
    }
    return table;
}

} // namespace psaw
