#include <doctest.h>

#include <cmath>
#include <vector>

#include "appealgate/common/errors.hpp"
#include "appealgate/common/rng.hpp"
#include "appealgate/stats/logit.hpp"
#include "appealgate/stats/special.hpp"
#include "appealgate/stats/tests.hpp"
#include "support/oracles.hpp"

using namespace appealgate;
using stats::ContingencyTable2x2;

TEST_CASE("special functions match integration oracles within 1e-10") {
    for (double x : {0.05, 0.3, 0.7, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
        const double expected = oracles::erfc_by_integration(x);
        CHECK(std::fabs(stats::erfc(x) - expected) <= 1e-10 * std::max(1.0, std::fabs(expected)));
    }
    CHECK(stats::erfc(0.0) == doctest::Approx(1.0));
    CHECK(std::fabs(stats::erfc(-1.3) - (2.0 - stats::erfc(1.3))) < 1e-15);

    for (double a : {0.5, 1.0, 2.5, 5.0, 10.0}) {
        for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 12.0}) {
            const double expected = oracles::gamma_p_by_integration(a, x);
            CHECK(std::fabs(stats::regularized_gamma_p(a, x) - expected) <=
                  1e-10 * std::max(1.0, std::fabs(expected)));
        }
    }

    for (double a : {0.5, 1.0, 2.0, 3.5, 8.0}) {
        for (double b : {0.5, 1.0, 2.0, 4.5}) {
            for (double x : {0.05, 0.25, 0.5, 0.75, 0.95}) {
                const double expected = oracles::beta_inc_by_integration(x, a, b);
                CHECK(std::fabs(stats::regularized_beta(x, a, b) - expected) <=
                      1e-10 * std::max(1.0, std::fabs(expected)));
            }
        }
    }
}

TEST_CASE("chi-squared with continuity correction reproduces reference statistics") {
    // Frozen reference values: responded/visible/toxicity/grants tables.
    const auto workload_responded = stats::chi2_yates({263, 175, 105, 337});
    CHECK(workload_responded.statistic == doctest::Approx(117.59).epsilon(0.0004));
    CHECK(workload_responded.p < 1e-26);
    CHECK(workload_responded.p > 1e-28);

    const auto toxic_visible = stats::chi2_yates({58, 380, 5, 126});
    CHECK(toxic_visible.statistic == doctest::Approx(8.17).epsilon(0.0025));
    CHECK(toxic_visible.p == doctest::Approx(0.004).epsilon(0.1));

    const auto grants = stats::chi2_yates({48, 390, 42, 400});
    CHECK(grants.statistic == doctest::Approx(0.362).epsilon(0.014));
    CHECK(grants.p == doctest::Approx(0.547).epsilon(0.01));

    const auto response_rate = stats::chi2_yates({263, 175, 105, 26});
    CHECK(response_rate.statistic == doctest::Approx(16.97).epsilon(0.003));
    CHECK(response_rate.p == doctest::Approx(3.78e-5).epsilon(0.05));

    const auto flat = stats::chi2_yates({50, 50, 50, 50});
    CHECK(flat.statistic == 0.0);
    CHECK(flat.p == 1.0);
}

TEST_CASE("chi-squared degenerate marginals raise") {
    CHECK_THROWS_AS(stats::chi2_yates({0, 0, 5, 5}), ValidationError);
    CHECK_THROWS_AS(stats::chi2_yates({0, 5, 0, 5}), ValidationError);
    // A zero cell with positive marginals stays legal.
    CHECK_NOTHROW(stats::chi2_yates({438, 0, 131, 311}));
}

TEST_CASE("chi-squared invariances") {
    Rng rng(991);
    int strict = 0;
    for (int trial = 0; trial < 200; ++trial) {
        ContingencyTable2x2 t{rng.uniform_int(1, 400), rng.uniform_int(1, 400),
                              rng.uniform_int(1, 400), rng.uniform_int(1, 400)};
        const auto base = stats::chi2_yates(t);
        // simultaneous row and column swap
        const auto swapped = stats::chi2_yates({t.d, t.c, t.b, t.a});
        CHECK(base.statistic == doctest::Approx(swapped.statistic).epsilon(1e-12));
        // scaling all cells up never decreases the statistic
        const auto scaled = stats::chi2_yates({t.a * 3, t.b * 3, t.c * 3, t.d * 3});
        CHECK(scaled.statistic >= base.statistic - 1e-9);
        if (scaled.statistic > base.statistic + 1e-9) ++strict;
        // p falls as the statistic grows (same df)
        if (scaled.statistic > base.statistic) CHECK(scaled.p <= base.p + 1e-12);
    }
    CHECK(strict > 150); // scaling is strictly increasing away from equality
}

TEST_CASE("pooled t-test") {
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{2, 3, 4};
    const auto r = stats::t_test_independent(a, b);
    CHECK(r.statistic == doctest::Approx(-1.2247448714).epsilon(1e-9));
    CHECK(r.df == doctest::Approx(4.0));
    CHECK(r.p == doctest::Approx(0.2878641347).epsilon(1e-8));
    // hand-evaluated oracle for the p-value route
    const double x = 4.0 / (4.0 + r.statistic * r.statistic);
    CHECK(r.p == doctest::Approx(oracles::beta_inc_by_integration(x, 2.0, 0.5)).epsilon(1e-10));

    const auto swapped = stats::t_test_independent(b, a);
    CHECK(swapped.statistic == doctest::Approx(-r.statistic));
    CHECK(swapped.p == doctest::Approx(r.p));

    const std::vector<double> same{5, 5, 5};
    const auto degenerate_equal = stats::t_test_independent(same, same);
    CHECK(degenerate_equal.statistic == 0.0);
    CHECK(degenerate_equal.p == 1.0);

    const std::vector<double> other{7, 7, 7};
    CHECK_THROWS_AS(stats::t_test_independent(same, other), ValidationError);
    CHECK_THROWS_AS(stats::t_test_independent(std::vector<double>{1.0}, same), ValidationError);
}

TEST_CASE("odds ratio") {
    CHECK(stats::odds_ratio(3.408, 0.1) == doctest::Approx(1.406).epsilon(0.0008));
    CHECK(stats::odds_ratio(123.0, 0.0) == 1.0);
    CHECK(stats::odds_ratio(-3.408, 0.1) == doctest::Approx(1.0 / 1.406).epsilon(0.0008));
}

TEST_CASE("wilson interval") {
    const auto [lo, hi] = stats::proportion_ci(90, 880, 0.95);
    CHECK(lo == doctest::Approx(0.0839505152).epsilon(1e-7));
    CHECK(hi == doctest::Approx(0.1240522402).epsilon(1e-7));

    const auto [lo0, hi0] = stats::proportion_ci(0, 10);
    CHECK(lo0 == 0.0);
    CHECK(hi0 > 0.0);

    // completion-by-toxicity intervals must separate
    const auto toxic = stats::proportion_ci(5, 57, 0.95);
    const auto nontoxic = stats::proportion_ci(126, 385, 0.95);
    CHECK(toxic.second < nontoxic.first);

    CHECK_THROWS_AS(stats::proportion_ci(11, 10), ValidationError);
}

namespace {

// Bernoulli draw matrix with one covariate, known coefficients.
void synth_logit(Rng& rng, int n, double b0, double b1, Eigen::MatrixXd& X, Eigen::VectorXd& y) {
    X.resize(n, 1);
    y.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform();
        const double p = 1.0 / (1.0 + std::exp(-(b0 + b1 * x)));
        X(i, 0) = x;
        y[i] = rng.bernoulli(p) ? 1.0 : 0.0;
    }
}

} // namespace

TEST_CASE("logit inference recovers parameters and reports calibrated errors") {
    // Coverage: estimates within 2 SE of truth in ~95% of seeded draws.
    int covered0 = 0, covered1 = 0;
    for (int seed = 0; seed < 100; ++seed) {
        Rng rng(1000 + static_cast<std::uint64_t>(seed));
        Eigen::MatrixXd X;
        Eigen::VectorXd y;
        synth_logit(rng, 5000, -1.0, 3.4, X, y);
        const auto table = stats::logit_inference(X, y, {"x"});
        const auto& b0 = table.coefficients[0];
        const auto& b1 = table.coefficients[1];
        if (std::fabs(b0.estimate - (-1.0)) <= 2.0 * b0.std_error) ++covered0;
        if (std::fabs(b1.estimate - 3.4) <= 2.0 * b1.std_error) ++covered1;
    }
    CHECK(covered0 >= 90);
    CHECK(covered1 >= 90);
}

TEST_CASE("logit inference: intercept-only fit equals the base-rate logit") {
    // 12.9% positives: the intercept MLE is log(0.129/0.871) in closed form.
    const int n = 1000;
    Eigen::MatrixXd X(n, 0);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = i < 129 ? 1.0 : 0.0;
    const auto table = stats::logit_inference(X, y);
    CHECK(table.coefficients[0].estimate == doctest::Approx(std::log(0.129 / 0.871)).epsilon(1e-9));
    CHECK(table.aic == doctest::Approx(2.0 - 2.0 * table.log_likelihood));
}

TEST_CASE("logit inference error paths") {
    Eigen::MatrixXd X(4, 1);
    X << 0, 1, 2, 3;
    Eigen::VectorXd y(4);
    y << 0, 0, 0, 0;
    CHECK_THROWS_AS(stats::logit_inference(X, y), ValidationError); // single class

    Eigen::MatrixXd Xdup(4, 2);
    Xdup << 0, 0, 1, 1, 2, 2, 3, 3; // second column duplicates the first
    Eigen::VectorXd y2(4);
    y2 << 0, 1, 0, 1;
    CHECK_THROWS_AS(stats::logit_inference(Xdup, y2), ValidationError); // rank deficient

    Eigen::MatrixXd Xsep(6, 1);
    Xsep << 0, 1, 2, 10, 11, 12;
    Eigen::VectorXd ysep(6);
    ysep << 0, 0, 0, 1, 1, 1; // perfectly separated
    CHECK_THROWS_AS(stats::logit_inference(Xsep, ysep), std::runtime_error);
}

TEST_CASE("logit inference sits at a local optimum") {
    Rng rng(77);
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    synth_logit(rng, 800, -0.5, 1.8, X, y);
    const auto table = stats::logit_inference(X, y);

    auto loglik = [&](double c, double w) {
        double ll = 0.0;
        for (int i = 0; i < X.rows(); ++i) {
            const double z = c + w * X(i, 0);
            const double log_sig = z > 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
            ll += y[i] == 1.0 ? log_sig : log_sig - z;
        }
        return ll;
    };
    const double at_optimum = loglik(table.coefficients[0].estimate, table.coefficients[1].estimate);
    CHECK(at_optimum == doctest::Approx(table.log_likelihood).epsilon(1e-10));
    for (int probe = 0; probe < 50; ++probe) {
        const double dc = rng.uniform(-0.5, 0.5);
        const double dw = rng.uniform(-0.5, 0.5);
        CHECK(loglik(table.coefficients[0].estimate + dc, table.coefficients[1].estimate + dw) <=
              at_optimum + 1e-9);
    }
}

TEST_CASE("significance stars") {
    CHECK(stats::stars_for_p(0.2) == "");
    CHECK(stats::stars_for_p(0.04) == "*");
    CHECK(stats::stars_for_p(0.009) == "**");
    CHECK(stats::stars_for_p(0.0009) == "***");
}
