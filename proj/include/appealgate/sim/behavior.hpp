#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "appealgate/common/rng.hpp"

namespace appealgate::sim {

// Generative model of appellant and moderator behavior. The pps Beta shape,
// completion_btox, and the grant propensity constants are calibrated by the
// `calibrate` subcommand so the aggregate rates land on their targets; the
// remaining knobs are documented modeling choices.
struct BehaviorConfig {
    long n_users = 880;
    std::uint64_t seed = 1;

    // pps ~ Beta(alpha, beta)
    double pps_alpha = 0.2716706234;
    double pps_beta = 2.7283293766;

    // Appeal toxicity-score bands (score reproduced exactly by the lexicon
    // scorer when the report re-scores message bodies).
    double toxic_prob = 0.13;  // P(score >= 0.7)
    double severe_prob = 0.073; // P(score >= 0.9), subset of toxic_prob
    double mild_prob = 0.05;    // P(0.5 <= score < 0.7)

    // completion probability = sigmoid(b0 + b1*pps + btox*[toxic])
    double completion_b0 = -1.051;
    double completion_b1 = 3.408;
    double completion_btox = -1.7142392591;

    // moderator behavior
    double respond_control = 263.0 / 438.0;
    double respond_treatment = 105.0 / 131.0;
    // grant propensity given a response: clamp(base + pps*g1 + complete*g2, 0, 1)
    double grant_base = 0.0260759863;
    double grant_pps = 0.5;
    double grant_complete = 0.3342121282;
    double grant_target = 90.0 / 880.0; // calibration input, kept for reference

    double missing_reason_prob = 0.0; // ban notices lacking a reason (bypass path)
    double followup_toxic_prob = 0.04;
    double mute_prob = 0.05; // responded, denied, toxic-appeal users

    // message-count model: followups ~ Geom(q), moderator messages 1+Geom(q)
    double extra_user_messages_q = 0.25;
    double mod_messages_q = 0.4;
    double abandoned_messages_q = 0.5; // extra messages from treatment abandoners

    double mod_chars_median_control = 210.0;
    double mod_chars_median_treatment = 208.0;
    double mod_chars_sigma = 0.6;

    double median_completion_seconds = 290.0;
    double completion_sigma = 0.5; // lognormal spread around the median
};

struct SimulatedUser {
    std::string id;
    double pps = 0.0;
    double toxicity_score = 0.0; // intended appeal score
    bool toxic = false;          // score >= 0.7
    bool will_complete = false;
    bool missing_reason = false;
    std::string appeal_text;
    std::uint64_t seed = 0; // per-user behavioral stream
};

// Deterministic under config.seed. Appeal text n-gram content correlates
// with pps (two token pools mixed by pps), so the PPS classifier is
// learnable from simulated corpora; toxicity rides on exact lexicon tokens.
std::vector<SimulatedUser> generate_population(const BehaviorConfig& config);

// Text with the pps-mixed base tokens plus ladder tokens composing the
// target toxicity weight; score is reproduced exactly by the lexicon scorer.
std::string compose_text(Rng& rng, double pool_mix, double target_score);

// Draw one toxicity score: 0 for benign, otherwise a band value expressible
// as 1 - exp(-k/32) for integer k.
double draw_toxicity_score(Rng& rng, const BehaviorConfig& config);

const std::vector<std::string>& contrite_pool();
const std::vector<std::string>& hostile_pool();

} // namespace appealgate::sim
