#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace appealgate::stats {

// Rows are groups, columns are outcome/complement.
struct ContingencyTable2x2 {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;
    std::int64_t d = 0;

    std::int64_t n() const { return a + b + c + d; }
};

struct TestResult {
    double statistic = 0.0;
    double df = 0.0;
    double p = 1.0;
};

// 2x2 chi-squared with Yates continuity correction:
// sum over cells of (max(|O-E| - 1/2, 0))^2 / E, df = 1.
// Throws ValidationError on any zero row or column marginal.
TestResult chi2_yates(const ContingencyTable2x2& table);

// Student's pooled-variance two-sided independent-samples t-test.
TestResult t_test_independent(std::span<const double> sample_a, std::span<const double> sample_b);

// exp(coefficient * delta): multiplicative change in odds for a delta-sized
// shift of the covariate.
double odds_ratio(double coefficient, double delta);

// Wilson score interval.
std::pair<double, double> proportion_ci(std::int64_t successes, std::int64_t n, double level = 0.95);

} // namespace appealgate::stats
