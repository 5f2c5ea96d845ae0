#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace appealgate::stats {

struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double z = 0.0;
    double p = 1.0;
    std::string stars; // "", "*", "**", "***" at p < 0.05 / 0.01 / 0.001
};

struct RegressionTable {
    std::vector<Coefficient> coefficients;
    double log_likelihood = 0.0;
    double aic = 0.0; // 2k - 2 log L
    long n = 0;
    int iterations = 0;
};

// Unpenalized logistic MLE by Newton-Raphson. X must NOT contain the
// intercept column; one is prepended internally and reported first.
// Standard errors come from the inverse observed information; Wald p-values
// are two-sided normal. Throws ValidationError for single-class labels or a
// rank-deficient design, std::runtime_error with iteration diagnostics when
// the likelihood is unbounded (separation) or Newton fails to converge.
RegressionTable logit_inference(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                const std::vector<std::string>& names = {});

std::string stars_for_p(double p);

} // namespace appealgate::stats
