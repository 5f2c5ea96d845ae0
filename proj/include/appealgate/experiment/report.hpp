#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "appealgate/experiment/event_log.hpp"
#include "appealgate/pps/logistic.hpp"
#include "appealgate/stats/logit.hpp"
#include "appealgate/stats/tests.hpp"
#include "appealgate/toxicity/scorer.hpp"

namespace appealgate::experiment {

using TextScorer = std::function<double(const std::string&)>;

struct ReportOptions {
    double threshold = 0.7;
    std::vector<double> sweep_thresholds = {0.5, 0.7, 0.9};
};

struct GroupCounts {
    long total = 0;
    long visible = 0;
    long responded = 0;
    long granted = 0;
    long completed = 0;
    long bypassed = 0;
};

struct HypothesisResult {
    std::string id;
    std::string measure;
    bool defined = false; // false when the table was degenerate
    stats::ContingencyTable2x2 table;
    stats::TestResult test;
    std::string note;
};

struct TTestLine {
    std::string measure;
    bool defined = false;
    stats::TestResult test;
    double median_control = 0.0;
    double median_treatment = 0.0;
};

struct RateWithCi {
    long numerator = 0;
    long denominator = 0;
    bool defined = false;
    double rate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

struct ExperimentReport {
    ReportOptions options;
    GroupCounts control;
    GroupCounts treatment;

    double response_rate_control = 0.0;   // responded / visible
    double response_rate_treatment = 0.0;

    HypothesisResult h1a_visible;
    HypothesisResult h1b_responded;
    HypothesisResult h2a_toxic_visible;
    HypothesisResult h2b_followup_toxicity;
    HypothesisResult h3a_grants;
    HypothesisResult h3b_response_rate;

    TTestLine messages_per_conversation;
    TTestLine moderator_messages;
    TTestLine moderator_characters;

    bool regression_defined = false;
    std::string regression_error;
    stats::RegressionTable pps_regression; // completion ~ pps, treatment users
    double odds_ratio_10pt = 0.0;          // exp(0.1 * pps coefficient)

    std::vector<toxicity::SweepRow> sweep;

    RateWithCi completion_nontoxic; // completion rate by appeal-toxicity class
    RateWithCi completion_toxic;

    long followup_messages_control = 0;
    long followup_messages_treatment = 0;
    long followup_toxic_control = 0;
    long followup_toxic_treatment = 0;
    long backforth_conversations_control = 0;
    long backforth_conversations_treatment = 0;

    std::optional<double> median_completion_seconds;
    long manual_labels_present = 0;
    long manual_labels_toxic = 0;
};

// Every count in the report is derived from the event log alone. Treatment
// appeals need a PPS source: an explicit value in the assignment payload, or
// the model; with neither the build fails listing the offending users.
ExperimentReport build_report(const std::vector<EventRecord>& records, const TextScorer& scorer,
                              const ReportOptions& options, const pps::LogisticModel* model = nullptr);
ExperimentReport build_report_from_file(const std::string& path, const TextScorer& scorer,
                                        const ReportOptions& options,
                                        const pps::LogisticModel* model = nullptr);

std::pair<RateWithCi, RateWithCi> completion_rates_by_toxicity(const std::vector<EventRecord>& records,
                                                               const TextScorer& scorer, double threshold);

std::string render_markdown(const ExperimentReport& report);
// Writes workload.csv, outcomes.csv, hypotheses.csv, regression.csv,
// sweep.csv, completion_by_toxicity.csv into the directory.
void write_csv_tables(const ExperimentReport& report, const std::string& directory);

} // namespace appealgate::experiment
