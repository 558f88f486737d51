#pragma once

#include <stdexcept>
#include <string>

namespace psaw {

// Bad option values, malformed expressions, inconsistent generator specs.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or malformed input files (corpora, embeddings, classifiers).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A word is missing from the embedding vocabulary.
class OovError : public std::runtime_error {
public:
    explicit OovError(const std::string& word)
        : std::runtime_error("out-of-vocabulary word: " + word), word_(word) {}
    const std::string& word() const { return word_; }

private:
    std::string word_;
};

// The search cannot start or make progress (e.g. no discriminative vocabulary).
class TrainError : public std::runtime_error {
public:
    explicit TrainError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace psaw
