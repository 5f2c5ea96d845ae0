#include "appealgate/sim/behavior.hpp"

#include <cmath>
#include <sstream>

#include "appealgate/common/errors.hpp"
#include "appealgate/toxicity/scorer.hpp"

namespace appealgate::sim {

const std::vector<std::string>& contrite_pool() {
    static const std::vector<std::string> pool = {
        "sorry",   "apologize", "mistake",  "understand",     "rules",    "respect",
        "wrong",   "regret",    "learn",    "appreciate",     "explain",  "context",
        "accept",  "honest",    "better",   "responsibility", "future",   "careful",
        "genuine", "improve",   "amends",   "acknowledge",    "fair",     "community",
    };
    return pool;
}

const std::vector<std::string>& hostile_pool() {
    static const std::vector<std::string> pool = {
        "unfair",    "ridiculous", "absurd",   "biased",      "joke",      "pointless",
        "censorship", "overreach", "petty",    "wrongful",    "targeted",  "harassed",
        "unjustified", "excessive", "arbitrary", "hypocrites", "agenda",   "silenced",
        "outrage",   "laughable",  "sham",     "kangaroo",    "vendetta",  "nonsense",
    };
    return pool;
}

double draw_toxicity_score(Rng& rng, const BehaviorConfig& config) {
    const double u = rng.uniform();
    long k = 0;
    if (u < config.severe_prob) {
        k = rng.uniform_int(75, 146); // 1-exp(-k/32): [0.904, 0.990]
    } else if (u < config.toxic_prob) {
        k = rng.uniform_int(40, 73); // [0.713, 0.898]
    } else if (u < config.toxic_prob + config.mild_prob) {
        k = rng.uniform_int(23, 38); // [0.513, 0.695]
    } else {
        return 0.0;
    }
    return 1.0 - std::exp(-static_cast<double>(k) * 0.03125);
}

std::string compose_text(Rng& rng, double pool_mix, double target_score) {
    const auto& hi = contrite_pool();
    const auto& lo = hostile_pool();
    const int base_tokens = 6 + static_cast<int>(rng.geometric(0.18));
    std::ostringstream text;
    for (int i = 0; i < base_tokens; ++i) {
        if (i > 0) text << ' ';
        const auto& pool = rng.bernoulli(pool_mix) ? hi : lo;
        text << pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
    }
    if (target_score > 0.0) {
        // Recover k from the band draw and append one ladder token per bit.
        const long k = std::lround(-std::log(1.0 - target_score) / 0.03125);
        const auto& ladder = toxicity::lexicon_ladder();
        for (std::size_t bit = 0; bit < ladder.size(); ++bit)
            if (k & (1L << bit)) text << ' ' << ladder[bit].first;
    }
    return text.str();
}

std::vector<SimulatedUser> generate_population(const BehaviorConfig& config) {
    if (config.n_users < 1) throw ValidationError("n_users must be positive");
    if (config.pps_alpha <= 0.0 || config.pps_beta <= 0.0)
        throw ValidationError("pps Beta parameters must be positive");
    if (config.severe_prob > config.toxic_prob)
        throw ValidationError("severe_prob is a subset of toxic_prob");

    std::vector<SimulatedUser> users;
    users.reserve(static_cast<std::size_t>(config.n_users));
    for (long i = 0; i < config.n_users; ++i) {
        SimulatedUser user;
        std::ostringstream id;
        id << "u" << i + 1;
        user.id = id.str();
        user.seed = splitmix64(config.seed ^ (0x5EEDu + static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ULL));
        Rng rng(user.seed);

        user.pps = rng.beta(config.pps_alpha, config.pps_beta);
        user.toxicity_score = draw_toxicity_score(rng, config);
        user.toxic = user.toxicity_score >= 0.7;
        const double z = config.completion_b0 + config.completion_b1 * user.pps +
                         (user.toxic ? config.completion_btox : 0.0);
        user.will_complete = rng.bernoulli(1.0 / (1.0 + std::exp(-z)));
        user.missing_reason = rng.bernoulli(config.missing_reason_prob);
        user.appeal_text = compose_text(rng, user.pps, user.toxicity_score);
        users.push_back(std::move(user));
    }
    return users;
}

} // namespace appealgate::sim
