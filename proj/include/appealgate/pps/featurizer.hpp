#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace appealgate::pps {

// Lowercase, strip punctuation characters, split on whitespace.
std::vector<std::string> tokenize(const std::string& text);

// Sparse counts over a fixed vocabulary; (index, count) pairs sorted by index.
using SparseVector = std::vector<std::pair<std::int32_t, std::int32_t>>;

struct Vocabulary {
    // n-gram -> dense index; iteration order is lexicographic, and indices
    // are assigned in that order. Bigrams join their tokens with '_'
    // (punctuation stripping guarantees '_' never appears inside a token).
    std::map<std::string, std::int32_t> index;

    std::size_t size() const { return index.size(); }
};

struct FeaturizerSettings {
    int min_df = 2; // keep n-grams present in at least this many documents
};

// Builds the unigram+bigram vocabulary over the corpus and featurizes it.
std::pair<Vocabulary, std::vector<SparseVector>> featurize(const std::vector<std::string>& corpus,
                                                           int min_df);

// Featurize one text against an existing vocabulary; out-of-vocabulary
// n-grams are dropped.
SparseVector featurize_one(const std::string& text, const Vocabulary& vocab);

} // namespace appealgate::pps
