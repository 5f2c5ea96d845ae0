#include "appealgate/stats/logit.hpp"

#include <cmath>
#include <sstream>

#include "appealgate/common/errors.hpp"
#include "appealgate/stats/special.hpp"

namespace appealgate::stats {

namespace {

double log_likelihood(const Eigen::MatrixXd& Xd, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = Xd * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        // log sigma(eta) and log(1 - sigma(eta)) in overflow-safe form
        const double e = eta[i];
        const double log_sig = e > 0 ? -std::log1p(std::exp(-e)) : e - std::log1p(std::exp(e));
        const double log_one_minus = log_sig - e;
        ll += y[i] * log_sig + (1.0 - y[i]) * log_one_minus;
    }
    return ll;
}

} // namespace

std::string stars_for_p(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

RegressionTable logit_inference(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                const std::vector<std::string>& names) {
    const Eigen::Index n = X.rows();
    if (n == 0 || y.size() != n)
        throw ValidationError("logit_inference: empty design or size mismatch");

    double ysum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y[i] != 0.0 && y[i] != 1.0)
            throw ValidationError("logit_inference: labels must be 0 or 1");
        ysum += y[i];
    }
    if (ysum == 0.0 || ysum == static_cast<double>(n))
        throw ValidationError("logit_inference: degenerate labels (single class)");

    // Prepend intercept column.
    Eigen::MatrixXd Xd(n, X.cols() + 1);
    Xd.col(0).setOnes();
    Xd.rightCols(X.cols()) = X;
    const Eigen::Index k = Xd.cols();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xd);
    if (qr.rank() < k)
        throw ValidationError("logit_inference: rank-deficient design matrix");

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    const int max_iter = 100;
    int iter = 0;
    double grad_norm = 0.0;
    bool converged = false;
    Eigen::MatrixXd info(k, k);
    Eigen::VectorXd mu(n);

    for (iter = 1; iter <= max_iter; ++iter) {
        const Eigen::VectorXd eta = Xd * beta;
        Eigen::VectorXd w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            mu[i] = 1.0 / (1.0 + std::exp(-eta[i]));
            w[i] = mu[i] * (1.0 - mu[i]);
        }
        const Eigen::VectorXd grad = Xd.transpose() * (y - mu);
        grad_norm = grad.lpNorm<Eigen::Infinity>();
        info = Xd.transpose() * w.asDiagonal() * Xd;

        if (grad_norm < 1e-10) {
            converged = true;
            break;
        }

        Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
            throw std::runtime_error("logit_inference: observed information not positive definite (separation?)");
        Eigen::VectorXd step = ldlt.solve(grad);

        // Newton decrement: nothing left to gain once it reaches noise level.
        const double ll0 = log_likelihood(Xd, y, beta);
        const double decrement = grad.dot(step);
        if (decrement < 1e-12 * (1.0 + std::fabs(ll0))) {
            converged = true;
            break;
        }

        // Halve the step when it degrades the likelihood beyond rounding.
        double scale = 1.0;
        Eigen::VectorXd cand = beta + step;
        const double tolerance = 1e-12 * (1.0 + std::fabs(ll0));
        int halvings = 0;
        while (log_likelihood(Xd, y, cand) < ll0 - tolerance && halvings < 40) {
            scale *= 0.5;
            cand = beta + scale * step;
            ++halvings;
        }
        beta = cand;

        if (beta.lpNorm<Eigen::Infinity>() > 1e4) {
            std::ostringstream msg;
            msg << "logit_inference: diverging estimates after " << iter
                << " iterations, |grad|=" << grad_norm << " (likely separation)";
            throw std::runtime_error(msg.str());
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "logit_inference: no convergence after " << max_iter << " iterations, |grad|=" << grad_norm;
        throw std::runtime_error(msg.str());
    }

    // A perfect fit means the likelihood is unbounded and the MLE sits at
    // infinity; the near-zero gradient at saturation is not convergence.
    bool all_saturated = true;
    for (Eigen::Index i = 0; i < n && all_saturated; ++i)
        if (std::fabs(mu[i] - y[i]) > 1e-6) all_saturated = false;
    if (all_saturated) {
        std::ostringstream msg;
        msg << "logit_inference: perfect separation after " << iter << " iterations, |grad|=" << grad_norm;
        throw std::runtime_error(msg.str());
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("logit_inference: singular information at optimum");
    const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(k, k));

    RegressionTable table;
    table.n = static_cast<long>(n);
    table.iterations = iter;
    table.log_likelihood = log_likelihood(Xd, y, beta);
    table.aic = 2.0 * static_cast<double>(k) - 2.0 * table.log_likelihood;
    for (Eigen::Index j = 0; j < k; ++j) {
        Coefficient c;
        if (j == 0)
            c.name = "(Intercept)";
        else if (static_cast<std::size_t>(j - 1) < names.size())
            c.name = names[static_cast<std::size_t>(j - 1)];
        else
            c.name = "x" + std::to_string(j);
        c.estimate = beta[j];
        c.std_error = std::sqrt(cov(j, j));
        c.z = c.estimate / c.std_error;
        c.p = normal_sf_twosided(c.z);
        c.stars = stars_for_p(c.p);
        table.coefficients.push_back(std::move(c));
    }
    return table;
}

} // namespace appealgate::stats
