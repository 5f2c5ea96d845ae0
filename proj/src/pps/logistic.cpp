#include "appealgate/pps/logistic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "appealgate/common/errors.hpp"
#include "appealgate/common/rng.hpp"

namespace appealgate::pps {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double dot_with(const SparseVector& features, const std::vector<double>& beta) {
    // beta[0] is the intercept, feature j lives at beta[j+1]
    double z = beta[0];
    for (const auto& [idx, count] : features)
        z += beta[static_cast<std::size_t>(idx) + 1] * static_cast<double>(count);
    return z;
}

} // namespace

double LogisticModel::predict_sparse(const SparseVector& features) const {
    double z = intercept;
    for (const auto& [idx, count] : features)
        z += weights[static_cast<std::size_t>(idx)] * static_cast<double>(count);
    return sigmoid(z);
}

double LogisticModel::predict(const std::string& text) const {
    return predict_sparse(featurize_one(text, vocab));
}

double PenalizedObjective::value(const std::vector<double>& beta) const {
    double ll = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double z = dot_with(X[i], beta);
        const double log_sig = z > 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
        ll += y[i] == 1 ? log_sig : log_sig - z;
    }
    double penalty = 0.0;
    for (std::size_t j = 1; j <= dim; ++j) penalty += beta[j] * beta[j];
    return ll - 0.5 * l2 * penalty;
}

std::vector<double> PenalizedObjective::gradient(const std::vector<double>& beta) const {
    std::vector<double> grad(dim + 1, 0.0);
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double resid = static_cast<double>(y[i]) - sigmoid(dot_with(X[i], beta));
        grad[0] += resid;
        for (const auto& [idx, count] : X[i])
            grad[static_cast<std::size_t>(idx) + 1] += resid * static_cast<double>(count);
    }
    for (std::size_t j = 1; j <= dim; ++j) grad[j] -= l2 * beta[j];
    return grad;
}

LogisticModel train(const Vocabulary& vocab, const std::vector<SparseVector>& X,
                    const std::vector<int>& y, double l2) {
    if (X.empty() || X.size() != y.size())
        throw ValidationError("train: empty data or size mismatch");
    if (l2 < 0.0) throw ValidationError("train: l2 must be non-negative");
    int pos = 0;
    for (int label : y) {
        if (label != 0 && label != 1) throw ValidationError("train: labels must be 0 or 1");
        pos += label;
    }
    if (pos == 0 || static_cast<std::size_t>(pos) == y.size())
        throw ValidationError("train: degenerate labels (single class)");

    const std::size_t dim = vocab.size();
    const Eigen::Index k = static_cast<Eigen::Index>(dim) + 1;
    PenalizedObjective objective{X, y, dim, l2};

    std::vector<double> beta(dim + 1, 0.0);
    const double grad_tol = 1e-8;
    const int max_iter = 200;
    bool converged = false;

    Eigen::MatrixXd hessian(k, k);
    for (int iter = 0; iter < max_iter; ++iter) {
        const std::vector<double> grad = objective.gradient(beta);
        double gnorm = 0.0;
        for (double g : grad) gnorm = std::max(gnorm, std::fabs(g));
        if (gnorm < grad_tol) {
            converged = true;
            break;
        }

        // Observed information plus the ridge term (intercept unpenalized).
        hessian.setZero();
        for (std::size_t i = 0; i < X.size(); ++i) {
            const double mu = sigmoid(dot_with(X[i], beta));
            const double w = mu * (1.0 - mu);
            hessian(0, 0) += w;
            for (const auto& [aj, ac] : X[i]) {
                const Eigen::Index j = aj + 1;
                hessian(0, j) += w * ac;
                hessian(j, 0) += w * ac;
                for (const auto& [bj, bc] : X[i])
                    hessian(j, bj + 1) += w * static_cast<double>(ac) * static_cast<double>(bc);
            }
        }
        for (Eigen::Index j = 1; j < k; ++j) hessian(j, j) += l2;

        Eigen::VectorXd g(k);
        for (Eigen::Index j = 0; j < k; ++j) g[j] = grad[static_cast<std::size_t>(j)];
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("train: singular Hessian");
        const Eigen::VectorXd step = ldlt.solve(g);

        const double v0 = objective.value(beta);
        double scale = 1.0;
        std::vector<double> cand(beta);
        for (int halvings = 0; halvings < 50; ++halvings) {
            for (Eigen::Index j = 0; j < k; ++j)
                cand[static_cast<std::size_t>(j)] = beta[static_cast<std::size_t>(j)] + scale * step[j];
            if (objective.value(cand) >= v0) break;
            scale *= 0.5;
        }
        beta = cand;
    }
    if (!converged) {
        const std::vector<double> grad = objective.gradient(beta);
        double gnorm = 0.0;
        for (double g : grad) gnorm = std::max(gnorm, std::fabs(g));
        std::ostringstream msg;
        msg << "train: nonconvergence after " << max_iter << " iterations, |grad|=" << gnorm;
        if (l2 == 0.0) msg << " (perfect separation with l2=0?)";
        throw std::runtime_error(msg.str());
    }

    LogisticModel model;
    model.vocab = vocab;
    model.intercept = beta[0];
    model.weights.assign(beta.begin() + 1, beta.end());
    return model;
}

namespace {

ClassMetrics metrics_for_class(const std::vector<int>& truth, const std::vector<int>& pred, int cls) {
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool is_cls = truth[i] == cls;
        const bool said_cls = pred[i] == cls;
        if (is_cls && said_cls) ++tp;
        if (!is_cls && said_cls) ++fp;
        if (is_cls && !said_cls) ++fn;
    }
    ClassMetrics m;
    m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

// Stratified fold ids: shuffle each class separately, deal round-robin.
std::vector<int> make_folds(const std::vector<int>& y, int k, Rng& rng) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::vector<int> fold(y.size(), 0);
    int next = 0;
    for (std::size_t i : pos) fold[i] = next++ % k;
    for (std::size_t i : neg) fold[i] = next++ % k;
    return fold;
}

} // namespace

CvReport cross_validate(const std::vector<std::string>& corpus, const std::vector<int>& y,
                        int k, double l2, int min_df, std::uint64_t seed) {
    if (k < 2) throw ValidationError("cross_validate: k must be >= 2");
    if (corpus.size() != y.size() || corpus.size() < static_cast<std::size_t>(k))
        throw ValidationError("cross_validate: need at least k examples");
    int pos = 0;
    for (int label : y) pos += label;
    if (pos == 0 || static_cast<std::size_t>(pos) == y.size())
        throw ValidationError("cross_validate: both classes required");

    for (int attempt = 0; attempt < 10; ++attempt) {
        Rng rng(seed + static_cast<std::uint64_t>(attempt));
        const std::vector<int> fold = make_folds(y, k, rng);

        // A training split missing a class forces a refold.
        bool usable = true;
        for (int f = 0; f < k && usable; ++f) {
            int train_pos = 0, train_neg = 0;
            for (std::size_t i = 0; i < y.size(); ++i)
                if (fold[i] != f) (y[i] == 1 ? train_pos : train_neg)++;
            if (train_pos == 0 || train_neg == 0) usable = false;
        }
        if (!usable) continue;

        CvReport report;
        report.k = k;
        double macro_sum = 0.0;
        for (int f = 0; f < k; ++f) {
            std::vector<std::string> train_texts;
            std::vector<int> train_y;
            std::vector<std::size_t> test_idx;
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (fold[i] == f) {
                    test_idx.push_back(i);
                } else {
                    train_texts.push_back(corpus[i]);
                    train_y.push_back(y[i]);
                }
            }
            auto [vocab, X] = featurize(train_texts, min_df);
            const LogisticModel model = train(vocab, X, train_y, l2);

            std::vector<int> truth, pred;
            for (std::size_t i : test_idx) {
                truth.push_back(y[i]);
                pred.push_back(model.predict(corpus[i]) >= 0.5 ? 1 : 0);
            }
            FoldReport fr;
            fr.negative = metrics_for_class(truth, pred, 0);
            fr.positive = metrics_for_class(truth, pred, 1);
            fr.macro_f = 0.5 * (fr.negative.f1 + fr.positive.f1);
            macro_sum += fr.macro_f;
            report.folds.push_back(fr);
        }
        report.macro_f = macro_sum / static_cast<double>(k);
        return report;
    }
    throw std::runtime_error("cross_validate: could not stratify folds after 10 attempts");
}

namespace {
constexpr int kModelFormatVersion = 1;
}

void save_model(const LogisticModel& model, const std::string& path) {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = "ngram-logistic";
    j["min_df"] = model.settings.min_df;
    j["intercept"] = model.intercept;
    std::vector<std::string> grams(model.vocab.size());
    for (const auto& [gram, idx] : model.vocab.index) grams[static_cast<std::size_t>(idx)] = gram;
    j["vocabulary"] = grams;
    j["weights"] = model.weights;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    out << j.dump(2) << "\n";
}

LogisticModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (!j.contains("format_version") || j["format_version"].get<int>() != kModelFormatVersion)
        throw ValidationError("load_model: unsupported model format version");
    LogisticModel model;
    model.settings.min_df = j.at("min_df").get<int>();
    model.intercept = j.at("intercept").get<double>();
    const auto grams = j.at("vocabulary").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < grams.size(); ++i)
        model.vocab.index.emplace(grams[i], static_cast<std::int32_t>(i));
    model.weights = j.at("weights").get<std::vector<double>>();
    if (model.weights.size() != model.vocab.size())
        throw ValidationError("load_model: weight/vocabulary size mismatch");
    return model;
}

} // namespace appealgate::pps
