#pragma once

#include <cstdint>
#include <string>

#include "appealgate/core/engine.hpp"
#include "appealgate/sim/behavior.hpp"
#include "appealgate/toxicity/scorer.hpp"
#include "appealgate/webform/form.hpp"

namespace appealgate::cli {

// The one configuration document. load() validates strictly: unknown keys
// anywhere reject the whole file.
struct Config {
    double assignment_ratio = 0.5;
    std::uint64_t assignment_seed = 20220401;

    core::EngineConfig engine;
    webform::FormDefinition form = webform::FormDefinition::builtin_default();

    std::string toxicity_backend = "lexicon"; // or "remote"
    std::string lexicon_path;                 // empty -> builtin lexicon
    double toxicity_threshold = 0.7;
    toxicity::RemoteScorerConfig remote;

    int pps_min_df = 2;
    double pps_l2 = 1.0;
    int pps_cv_folds = 5;
    std::uint64_t pps_cv_seed = 7;

    sim::BehaviorConfig behavior;

    static Config defaults() { return {}; }
    static Config load(const std::string& path);

    // Scoring function per the configured backend; the APPEALGATE_SCORER_URL
    // environment variable overrides the remote endpoint.
    toxicity::LexiconScorer make_lexicon() const;
};

} // namespace appealgate::cli
