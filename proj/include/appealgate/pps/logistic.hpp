#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "appealgate/pps/featurizer.hpp"

namespace appealgate::pps {

struct LogisticModel {
    Vocabulary vocab;
    std::vector<double> weights; // one per vocabulary index
    double intercept = 0.0;
    FeaturizerSettings settings;

    // sigmoid(intercept + sum weights * counts); unknown n-grams ignored.
    double predict(const std::string& text) const;
    double predict_sparse(const SparseVector& features) const;
};

// L2-penalized log-likelihood: sum_i log p(y_i|x_i) - (l2/2) * ||w||^2 with
// the intercept unpenalized. Maximized by Newton iterations to infinity-norm
// gradient tolerance 1e-8.
struct PenalizedObjective {
    const std::vector<SparseVector>& X;
    const std::vector<int>& y;
    std::size_t dim; // number of features (without intercept)
    double l2;

    // beta layout: [intercept, w_0 .. w_{dim-1}]
    double value(const std::vector<double>& beta) const;
    std::vector<double> gradient(const std::vector<double>& beta) const;
};

// Trains on featurized rows. Throws ValidationError when only one class is
// present, std::runtime_error on nonconvergence (e.g. perfect separation with
// l2 = 0).
LogisticModel train(const Vocabulary& vocab, const std::vector<SparseVector>& X,
                    const std::vector<int>& y, double l2);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct FoldReport {
    ClassMetrics negative;
    ClassMetrics positive;
    double macro_f = 0.0;
};

struct CvReport {
    int k = 0;
    std::vector<FoldReport> folds;
    double macro_f = 0.0; // mean over folds of the per-fold macro F
};

// Stratified k-fold cross-validation at decision threshold 0.5. Folds are
// seeded; when a training split loses a class the data is refolded with a new
// seed, up to 10 attempts.
CvReport cross_validate(const std::vector<std::string>& corpus, const std::vector<int>& y,
                        int k, double l2, int min_df, std::uint64_t seed);

// Versioned flat-file model serialization (JSON); round-trip lossless.
void save_model(const LogisticModel& model, const std::string& path);
LogisticModel load_model(const std::string& path);

} // namespace appealgate::pps
