#include "appealgate/stats/tests.hpp"

#include <algorithm>
#include <cmath>

#include "appealgate/common/errors.hpp"
#include "appealgate/stats/special.hpp"

namespace appealgate::stats {

namespace {

// z with P(|Z| <= z) = level, by bisection on erfc.
double normal_quantile_twosided(double level) {
    if (level <= 0.0 || level >= 1.0)
        throw ValidationError("confidence level must be in (0, 1)");
    const double target = 1.0 - level; // two-sided tail mass
    double lo = 0.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (erfc(mid / std::sqrt(2.0)) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TestResult chi2_yates(const ContingencyTable2x2& t) {
    if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0)
        throw ValidationError("chi2_yates: negative cell count");
    const double r1 = static_cast<double>(t.a + t.b);
    const double r2 = static_cast<double>(t.c + t.d);
    const double c1 = static_cast<double>(t.a + t.c);
    const double c2 = static_cast<double>(t.b + t.d);
    if (r1 <= 0 || r2 <= 0 || c1 <= 0 || c2 <= 0)
        throw ValidationError("chi2_yates: degenerate table (zero marginal)");
    const double n = static_cast<double>(t.n());

    const double observed[4] = {static_cast<double>(t.a), static_cast<double>(t.b),
                                static_cast<double>(t.c), static_cast<double>(t.d)};
    const double expected[4] = {r1 * c1 / n, r1 * c2 / n, r2 * c1 / n, r2 * c2 / n};

    double statistic = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double dev = std::max(std::fabs(observed[i] - expected[i]) - 0.5, 0.0);
        statistic += dev * dev / expected[i];
    }
    return {statistic, 1.0, chi2_sf(statistic, 1)};
}

TestResult t_test_independent(std::span<const double> a, std::span<const double> b) {
    const std::size_t na = a.size(), nb = b.size();
    if (na < 2 || nb < 2)
        throw ValidationError("t_test_independent: each sample needs at least 2 values");

    double ma = 0.0, mb = 0.0;
    for (double v : a) ma += v;
    for (double v : b) mb += v;
    ma /= static_cast<double>(na);
    mb /= static_cast<double>(nb);

    double ssa = 0.0, ssb = 0.0;
    for (double v : a) ssa += (v - ma) * (v - ma);
    for (double v : b) ssb += (v - mb) * (v - mb);

    const double df = static_cast<double>(na + nb - 2);
    const double pooled_var = (ssa + ssb) / df;
    if (pooled_var <= 0.0) {
        if (ma == mb) return {0.0, df, 1.0};
        throw ValidationError("t_test_independent: degenerate variance with unequal means");
    }
    const double se = std::sqrt(pooled_var * (1.0 / static_cast<double>(na) + 1.0 / static_cast<double>(nb)));
    const double t = (ma - mb) / se;
    return {t, df, student_t_sf_twosided(t, df)};
}

double odds_ratio(double coefficient, double delta) {
    if (!std::isfinite(coefficient) || !std::isfinite(delta))
        throw ValidationError("odds_ratio: inputs must be finite");
    return std::exp(coefficient * delta);
}

std::pair<double, double> proportion_ci(std::int64_t successes, std::int64_t n, double level) {
    if (n < 1) throw ValidationError("proportion_ci: n must be >= 1");
    if (successes < 0 || successes > n)
        throw ValidationError("proportion_ci: successes out of range");
    const double z = normal_quantile_twosided(level);
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (phat + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

} // namespace appealgate::stats
