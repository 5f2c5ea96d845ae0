#include "appealgate/pps/featurizer.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "appealgate/common/errors.hpp"

namespace appealgate::pps {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char ch : text) {
        if (std::isspace(ch)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else if (!std::ispunct(ch)) {
            current.push_back(static_cast<char>(std::tolower(ch)));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    // Punctuation-only words collapse to empty strings; drop them.
    tokens.erase(std::remove_if(tokens.begin(), tokens.end(),
                                [](const std::string& t) { return t.empty(); }),
                 tokens.end());
    return tokens;
}

namespace {

std::vector<std::string> ngrams_of(const std::vector<std::string>& tokens) {
    std::vector<std::string> grams(tokens);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
        grams.push_back(tokens[i] + "_" + tokens[i + 1]);
    return grams;
}

SparseVector count_against(const std::vector<std::string>& grams, const Vocabulary& vocab) {
    std::unordered_map<std::int32_t, std::int32_t> counts;
    for (const auto& g : grams) {
        auto it = vocab.index.find(g);
        if (it != vocab.index.end()) ++counts[it->second];
    }
    SparseVector out(counts.begin(), counts.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::pair<Vocabulary, std::vector<SparseVector>> featurize(const std::vector<std::string>& corpus,
                                                           int min_df) {
    if (corpus.empty()) throw ValidationError("featurize: empty corpus");
    if (min_df < 1) throw ValidationError("featurize: min_df must be >= 1");

    std::vector<std::vector<std::string>> doc_grams;
    doc_grams.reserve(corpus.size());
    std::unordered_map<std::string, int> df;
    for (const auto& text : corpus) {
        doc_grams.push_back(ngrams_of(tokenize(text)));
        std::unordered_set<std::string> seen(doc_grams.back().begin(), doc_grams.back().end());
        for (const auto& g : seen) ++df[g];
    }

    Vocabulary vocab;
    for (const auto& [gram, count] : df)
        if (count >= min_df) vocab.index.emplace(gram, 0);
    std::int32_t next = 0;
    for (auto& [gram, idx] : vocab.index) idx = next++; // lexicographic via std::map order

    std::vector<SparseVector> vectors;
    vectors.reserve(corpus.size());
    for (const auto& grams : doc_grams) vectors.push_back(count_against(grams, vocab));
    return {std::move(vocab), std::move(vectors)};
}

SparseVector featurize_one(const std::string& text, const Vocabulary& vocab) {
    return count_against(ngrams_of(tokenize(text)), vocab);
}

} // namespace appealgate::pps
