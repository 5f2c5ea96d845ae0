#pragma once

#include <map>
#include <string>
#include <vector>

namespace appealgate::toxicity {

struct ToxicityScore {
    double value = 0.0; // in [0, 1]
};

// Term-weight lexicon scorer: score = 1 - exp(-sum of weights of matched
// lowercase terms), one weight added per matched token occurrence. Bounded,
// monotone in added terms, independent of token order.
class LexiconScorer {
public:
    LexiconScorer() = default;
    explicit LexiconScorer(std::map<std::string, double> weights);

    // File format: one `term<TAB>weight` per line, UTF-8; '#' lines ignored.
    static LexiconScorer load(const std::string& path);

    // The lexicon shipped with the repository (data/toxicity_lexicon.tsv
    // mirrors it; a test keeps the two in sync).
    static LexiconScorer builtin_default();

    ToxicityScore score(const std::string& text) const;

    const std::map<std::string, double>& weights() const { return weights_; }

private:
    std::map<std::string, double> weights_;
};

struct RemoteScorerConfig {
    std::string url;          // e.g. http://localhost:8080/score
    int timeout_ms = 2000;
    int max_retries = 3;
    int backoff_initial_ms = 50; // doubled after each failed attempt
};

// HTTP scorer: POST {"text": ...} -> {"score": ...}. Retries transient
// failures with exponential backoff, then throws OutageError.
class RemoteScorer {
public:
    explicit RemoteScorer(RemoteScorerConfig config);
    ToxicityScore score(const std::string& text) const;

private:
    RemoteScorerConfig config_;
};

// toxic iff score >= threshold (inclusive boundary).
bool classify(ToxicityScore score, double threshold);

struct AppealObservation {
    bool treatment = false;
    bool visible = false;   // for control this is always true
    bool completed = false; // treatment users who finished the form
    double score = 0.0;
};

struct SweepRow {
    double threshold = 0.0;
    long control_toxic = 0;
    long treatment_toxic = 0;
    long completed_toxic = 0;
    // Exact integer ratios: toxic visible / visible, per arm.
    double control_rate = 0.0;
    double after_process_rate = 0.0;
    long control_visible = 0;
    long treatment_visible = 0;
};

std::vector<SweepRow> threshold_sweep(const std::vector<AppealObservation>& appeals,
                                      const std::vector<double>& thresholds);

// Power-of-two weight ladder inside the builtin lexicon (ascending weights
// 2^-5 .. 4.0). Any multiple of 2^-5 up to 8-ish composes exactly from at
// most one occurrence per term, which lets generated text hit an intended
// score bit-exactly.
const std::vector<std::pair<std::string, double>>& lexicon_ladder();

} // namespace appealgate::toxicity
