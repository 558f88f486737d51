#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "psaw/corpus.hpp"
#include "psaw/rng.hpp"

namespace psaw {

struct EmbeddingTable {
    int dimension = 0;
    std::unordered_map<std::string, std::vector<float>> vectors;

    bool contains(const std::string& word) const { return vectors.count(word) != 0; }
};

// Standard text embedding format: a "vocab dimension" header line followed
// by one "word v1 .. vd" row per word. Gzip-compressed files are handled
// transparently. Duplicate words keep the last row (a warning is recorded
// in *warnings when given); all-zero vectors are rejected.
EmbeddingTable load_embeddings(const std::string& path,
                               std::vector<std::string>* warnings = nullptr);

void save_embeddings(const EmbeddingTable& table, const std::string& path);

// Throws OovError when either word is missing.
double cosine_similarity(const EmbeddingTable& table, const std::string& w1,
                         const std::string& w2);

// Similarity-proportional sampling among candidates: candidate i is chosen
// with probability sim_i / sum(sim_j), where sim_i is the cosine similarity
// to the anchor clamped below at kSimilarityFloor. An out-of-vocabulary
// anchor or candidate contributes the floor value, so the choice degrades
// to uniform rather than failing.
inline constexpr double kSimilarityFloor = 1e-6;

std::string similarity_weighted_choice(const EmbeddingTable& table, const std::string& anchor,
                                       const std::vector<std::string>& candidates, Rng& rng);

// Componentwise mean over in-vocabulary tokens; *all_oov reports when no
// token was found and the zero vector was returned.
std::vector<double> document_vector(const EmbeddingTable& table, const Document& doc,
                                    bool* all_oov = nullptr);

// Windowed positive-PMI co-occurrence vectors over the corpus vocabulary,
// using the `dimension_cap` most frequent words as context axes. A
// deterministic stand-in for a pre-trained model.
EmbeddingTable build_fallback_embeddings(const LabeledCorpus& corpus, int window,
                                         int dimension_cap);

} // namespace psaw
