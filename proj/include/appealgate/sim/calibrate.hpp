#pragma once

#include <functional>

namespace appealgate::sim {

// Targets the generative model is solved against. Defaults are the observed
// aggregates the simulation must land on.
struct CalibrationTargets {
    double completion_nontoxic = 126.0 / 385.0;
    double completion_toxic = 5.0 / 57.0;
    double toxic_prob = 0.13;
    double respond_control = 263.0 / 438.0;
    double respond_treatment = 105.0 / 131.0;
    double grant_overall = 90.0 / 880.0;
    double completion_b0 = -1.051;
    double completion_b1 = 3.408;
    double concentration = 3.0; // pps_alpha + pps_beta (fixed, tames the shape)
    double grant_pps = 0.5;     // fixed pps slope of the grant propensity
};

struct CalibrationResult {
    double pps_alpha = 0.0;
    double pps_beta = 0.0;
    double beta_tox = 0.0;
    double grant_base = 0.0;
    double grant_complete = 0.0;
    // achieved expectations, for the printout
    double completion_overall = 0.0;
    double completion_nontoxic = 0.0;
    double completion_toxic = 0.0;
    double grant_control = 0.0;
    double grant_treatment = 0.0;
};

// Solves, in order: the Beta mean from the non-toxic completion target, the
// toxicity offset from the toxic completion target, then the grant-propensity
// base and completion bonus so both arms hit the overall grant target with
// equal expected rates.
CalibrationResult calibrate(const CalibrationTargets& targets);

// E[fn(p)] for p ~ Beta(alpha, beta); endpoint singularities are removed by
// substitution before Gauss-Legendre quadrature.
double beta_expectation(double alpha, double beta, const std::function<double(double)>& fn);

} // namespace appealgate::sim
