#include "appealgate/sim/calibrate.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace appealgate::sim {

namespace {

struct QuadratureRule {
    std::vector<double> nodes;   // on (0, 1)
    std::vector<double> weights;
};

// Golub-Welsch on the Jacobi matrix of the Legendre recurrence, mapped to [0, 1].
const QuadratureRule& unit_gauss_legendre() {
    static const QuadratureRule rule = [] {
        constexpr int n = 160;
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) {
            const double b = i / std::sqrt(4.0 * i * i - 1.0);
            J(i - 1, i) = b;
            J(i, i - 1) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(J);
        QuadratureRule r;
        r.nodes.resize(n);
        r.weights.resize(n);
        for (int i = 0; i < n; ++i) {
            r.nodes[i] = 0.5 * (solver.eigenvalues()[i] + 1.0);
            const double v = solver.eigenvectors()(0, i);
            r.weights[i] = v * v; // 2 v^2 on [-1,1], halved by the map to [0,1]
        }
        return r;
    }();
    return rule;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double bisect(const std::function<double(double)>& fn, double lo, double hi, const char* what) {
    double flo = fn(lo);
    double fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw std::runtime_error(std::string("calibrate: no sign change bracketing ") + what);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = fn(mid);
        if ((fmid > 0) == (flo > 0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

double beta_expectation(double alpha, double beta, const std::function<double(double)>& fn) {
    // Split at 1/2; substitute p = (u^(1/alpha))/2 on the left half and
    // 1-p = (v^(1/beta))/2 on the right, which absorbs the endpoint
    // singularities into smooth integrands.
    const QuadratureRule& rule = unit_gauss_legendre();
    const double log_beta_fn = std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
    double left = 0.0, right = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double u = rule.nodes[i];
        const double w = rule.weights[i];
        const double pl = 0.5 * std::pow(u, 1.0 / alpha);
        left += w * fn(pl) * std::pow(1.0 - pl, beta - 1.0);
        const double pr = 1.0 - 0.5 * std::pow(u, 1.0 / beta);
        right += w * fn(pr) * std::pow(pr, alpha - 1.0);
    }
    left *= std::pow(0.5, alpha) / alpha;
    right *= std::pow(0.5, beta) / beta;
    return (left + right) * std::exp(-log_beta_fn);
}

CalibrationResult calibrate(const CalibrationTargets& t) {
    const double b0 = t.completion_b0;
    const double b1 = t.completion_b1;

    // 1. Beta mean: non-toxic completion target at fixed concentration.
    const double mu = bisect(
        [&](double m) {
            return beta_expectation(m * t.concentration, (1.0 - m) * t.concentration,
                                    [&](double p) { return sigmoid(b0 + b1 * p); }) -
                   t.completion_nontoxic;
        },
        1e-4, 0.999, "pps mean");
    const double alpha = mu * t.concentration;
    const double beta = (1.0 - mu) * t.concentration;

    // 2. Toxicity offset: toxic completion target.
    const double beta_tox = bisect(
        [&](double bt) {
            return beta_expectation(alpha, beta, [&](double p) { return sigmoid(b0 + b1 * p + bt); }) -
                   t.completion_toxic;
        },
        -14.0, 2.0, "toxicity offset");

    auto smix = [&](double p) {
        return (1.0 - t.toxic_prob) * sigmoid(b0 + b1 * p) + t.toxic_prob * sigmoid(b0 + b1 * p + beta_tox);
    };

    // 3. Grant propensity base (non-completers) and completion bonus, from
    //    the two arms' grant-mass targets. Control: moderators grant across
    //    the latent completion trait; treatment: completers only are visible.
    const double mass_noncompleter = t.grant_overall / t.respond_control - t.grant_overall / t.respond_treatment;
    const double mass_completer = t.grant_overall / t.respond_treatment;

    const double grant_base = bisect(
        [&](double g0) {
            return beta_expectation(alpha, beta,
                                    [&](double p) {
                                        const double g = std::min(std::max(g0 + t.grant_pps * p, 0.0), 1.0);
                                        return (1.0 - smix(p)) * g;
                                    }) -
                   mass_noncompleter;
        },
        -1.0, 1.0, "grant base");
    const double grant_complete = bisect(
        [&](double g2) {
            return beta_expectation(alpha, beta,
                                    [&](double p) {
                                        const double g = std::min(
                                            std::max(grant_base + t.grant_pps * p + g2, 0.0), 1.0);
                                        return smix(p) * g;
                                    }) -
                   mass_completer;
        },
        -1.0, 2.0, "grant completion bonus");

    CalibrationResult result;
    result.pps_alpha = alpha;
    result.pps_beta = beta;
    result.beta_tox = beta_tox;
    result.grant_base = grant_base;
    result.grant_complete = grant_complete;
    result.completion_overall = beta_expectation(alpha, beta, smix);
    result.completion_nontoxic =
        beta_expectation(alpha, beta, [&](double p) { return sigmoid(b0 + b1 * p); });
    result.completion_toxic =
        beta_expectation(alpha, beta, [&](double p) { return sigmoid(b0 + b1 * p + beta_tox); });
    const double noncompleter_mass = beta_expectation(alpha, beta, [&](double p) {
        const double g = std::min(std::max(grant_base + t.grant_pps * p, 0.0), 1.0);
        return (1.0 - smix(p)) * g;
    });
    const double completer_mass = beta_expectation(alpha, beta, [&](double p) {
        const double g = std::min(std::max(grant_base + t.grant_pps * p + grant_complete, 0.0), 1.0);
        return smix(p) * g;
    });
    result.grant_control = t.respond_control * (noncompleter_mass + completer_mass);
    result.grant_treatment = t.respond_treatment * completer_mass;
    return result;
}

} // namespace appealgate::sim
