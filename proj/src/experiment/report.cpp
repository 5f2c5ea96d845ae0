#include "appealgate/experiment/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "appealgate/common/errors.hpp"

namespace appealgate::experiment {

namespace {

struct Episode {
    core::UserId user;
    core::ConversationId conversation;
    bool permanent = false;
    bool reason_present = false;
    bool have_appeal = false;
    double appeal_score = 0.0;
    double model_pps = -1.0; // model prediction, used when no logged pps
    long user_followups = 0;
    long toxic_followups = 0;
    long mod_messages = 0;
    long mod_chars = 0;
    bool completed = false;
    std::optional<core::Timestamp> completion_duration;
    std::optional<bool> manual_label;
    std::optional<std::string> decision;
};

struct Aggregation {
    std::vector<Episode> episodes;              // creation order
    std::map<core::ConversationId, std::size_t> by_conversation;
    std::map<core::UserId, std::size_t> open_by_user;
    std::map<core::UserId, core::Group> group_of;
    std::map<core::UserId, double> pps_of; // logged true values
};

class Aggregator {
public:
    Aggregator(const TextScorer& scorer, double threshold, const pps::LogisticModel* model)
        : scorer_(scorer), threshold_(threshold), model_(model) {}

    void observe(const EventRecord& r) {
        switch (r.type) {
            case EventType::Message: observe_message(r); break;
            case EventType::Assignment: {
                agg_.group_of[r.user] = r.payload.at("group").get<std::string>() == "treatment"
                                            ? core::Group::Treatment
                                            : core::Group::Control;
                if (r.payload.contains("pps"))
                    agg_.pps_of[r.user] = r.payload.at("pps").get<double>();
                break;
            }
            case EventType::FormSubmit: {
                auto it = agg_.open_by_user.find(r.user);
                if (it == agg_.open_by_user.end()) break;
                Episode& e = agg_.episodes[it->second];
                e.completed = true;
                if (r.payload.contains("duration"))
                    e.completion_duration = r.payload.at("duration").get<core::Timestamp>();
                if (r.payload.contains("manual_toxicity_label"))
                    e.manual_label = r.payload.at("manual_toxicity_label").get<bool>();
                break;
            }
            case EventType::Decision: {
                auto it = agg_.by_conversation.find(r.conversation);
                if (it == agg_.by_conversation.end()) break;
                agg_.episodes[it->second].decision = r.payload.at("decision").get<std::string>();
                agg_.open_by_user.erase(agg_.episodes[it->second].user);
                break;
            }
            default: break; // bot actions and archive toggles carry no measures
        }
    }

    Aggregation take() { return std::move(agg_); }

private:
    void observe_message(const EventRecord& r) {
        const std::string sender = r.payload.at("sender").get<std::string>();
        const std::string body = r.payload.at("body").get<std::string>();
        if (r.payload.contains("ban")) {
            const auto& ban = r.payload.at("ban");
            if (!ban.at("permanent").get<bool>()) return; // temporary bans never enter
            Episode e;
            e.user = r.user;
            e.conversation = r.conversation;
            e.permanent = true;
            e.reason_present = ban.contains("reason");
            agg_.by_conversation[r.conversation] = agg_.episodes.size();
            agg_.open_by_user[r.user] = agg_.episodes.size();
            agg_.episodes.push_back(std::move(e));
            return;
        }
        auto it = agg_.by_conversation.find(r.conversation);
        if (it == agg_.by_conversation.end()) return; // not a ban thread
        Episode& e = agg_.episodes[it->second];
        if (sender == "user") {
            if (!e.have_appeal) {
                e.have_appeal = true;
                e.appeal_score = scorer_(body);
                if (model_) e.model_pps = model_->predict(body);
            } else {
                ++e.user_followups;
                if (scorer_(body) >= threshold_) ++e.toxic_followups;
            }
        } else if (sender == "moderator" && e.have_appeal) {
            ++e.mod_messages;
            e.mod_chars += static_cast<long>(body.size());
        }
    }

    const TextScorer& scorer_;
    double threshold_;
    const pps::LogisticModel* model_;
    Aggregation agg_;
};

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

HypothesisResult make_chi2(const std::string& id, const std::string& measure,
                           const stats::ContingencyTable2x2& table) {
    HypothesisResult h;
    h.id = id;
    h.measure = measure;
    h.table = table;
    try {
        h.test = stats::chi2_yates(table);
        h.defined = true;
    } catch (const ValidationError& e) {
        h.defined = false;
        h.note = e.what();
    }
    return h;
}

bool is_treatment(const Aggregation& agg, const Episode& e) {
    auto it = agg.group_of.find(e.user);
    return it != agg.group_of.end() && it->second == core::Group::Treatment;
}

bool is_visible(const Aggregation& agg, const Episode& e) {
    if (!is_treatment(agg, e)) return true;
    return e.completed || !e.reason_present; // bypassed appeals count as visible
}

ExperimentReport build_from_aggregation(Aggregation agg, const TextScorer& scorer,
                                        const ReportOptions& options, const pps::LogisticModel* model) {
    (void)scorer;
    ExperimentReport rep;
    rep.options = options;

    std::vector<const Episode*> appeals;
    for (const auto& e : agg.episodes)
        if (e.have_appeal) appeals.push_back(&e);
    if (appeals.empty()) throw ValidationError("build_report: log contains no appeals");

    for (const Episode* e : appeals) {
        if (!agg.group_of.count(e->user))
            throw CorruptLogError("appeal without assignment for user " + e->user);
        const bool treatment = is_treatment(agg, *e);
        GroupCounts& g = treatment ? rep.treatment : rep.control;
        ++g.total;
        const bool visible = is_visible(agg, *e);
        if (visible) ++g.visible;
        if (e->mod_messages > 0) ++g.responded;
        if (e->decision && *e->decision == "granted") ++g.granted;
        if (e->completed) ++g.completed;
        if (treatment && !e->reason_present) ++g.bypassed;
    }

    rep.response_rate_control =
        rep.control.visible > 0 ? static_cast<double>(rep.control.responded) / rep.control.visible : 0.0;
    rep.response_rate_treatment =
        rep.treatment.visible > 0 ? static_cast<double>(rep.treatment.responded) / rep.treatment.visible
                                  : 0.0;

    // Workload + outcome hypothesis tables.
    rep.h1a_visible = make_chi2(
        "H1a", "appeals visible to moderators",
        {rep.control.visible, rep.control.total - rep.control.visible, rep.treatment.visible,
         rep.treatment.total - rep.treatment.visible});
    rep.h1b_responded = make_chi2(
        "H1b", "appeals responded to",
        {rep.control.responded, rep.control.total - rep.control.responded, rep.treatment.responded,
         rep.treatment.total - rep.treatment.responded});

    long toxic_visible_control = 0, toxic_visible_treatment = 0;
    for (const Episode* e : appeals) {
        if (!is_visible(agg, *e)) continue;
        if (e->appeal_score < options.threshold) continue;
        (is_treatment(agg, *e) ? toxic_visible_treatment : toxic_visible_control)++;
    }
    rep.h2a_toxic_visible = make_chi2(
        "H2a", "toxic share of visible appeals",
        {toxic_visible_control, rep.control.visible - toxic_visible_control, toxic_visible_treatment,
         rep.treatment.visible - toxic_visible_treatment});

    // Follow-up toxicity over conversations with at least one back-and-forth
    // exchange after the initial appeal.
    for (const Episode* e : appeals) {
        if (e->user_followups < 1 || e->mod_messages < 1) continue;
        const bool treatment = is_treatment(agg, *e);
        (treatment ? rep.backforth_conversations_treatment : rep.backforth_conversations_control)++;
        (treatment ? rep.followup_messages_treatment : rep.followup_messages_control) += e->user_followups;
        (treatment ? rep.followup_toxic_treatment : rep.followup_toxic_control) += e->toxic_followups;
    }
    rep.h2b_followup_toxicity = make_chi2(
        "H2b", "toxic share of follow-up user messages",
        {rep.followup_toxic_control, rep.followup_messages_control - rep.followup_toxic_control,
         rep.followup_toxic_treatment, rep.followup_messages_treatment - rep.followup_toxic_treatment});

    rep.h3a_grants = make_chi2(
        "H3a", "appeals granted",
        {rep.control.granted, rep.control.total - rep.control.granted, rep.treatment.granted,
         rep.treatment.total - rep.treatment.granted});
    rep.h3b_response_rate = make_chi2(
        "H3b", "moderator response rate on visible appeals",
        {rep.control.responded, rep.control.visible - rep.control.responded, rep.treatment.responded,
         rep.treatment.visible - rep.treatment.responded});

    // Engagement depth over conversations moderators responded to.
    std::vector<double> msg_c, msg_t, mod_c, mod_t, chars_c, chars_t;
    for (const Episode* e : appeals) {
        if (e->mod_messages < 1) continue;
        const double total_messages = static_cast<double>(1 + e->user_followups + e->mod_messages);
        if (is_treatment(agg, *e)) {
            msg_t.push_back(total_messages);
            mod_t.push_back(static_cast<double>(e->mod_messages));
            chars_t.push_back(static_cast<double>(e->mod_chars));
        } else {
            msg_c.push_back(total_messages);
            mod_c.push_back(static_cast<double>(e->mod_messages));
            chars_c.push_back(static_cast<double>(e->mod_chars));
        }
    }
    auto t_line = [](const std::string& measure, const std::vector<double>& a,
                     const std::vector<double>& b) {
        TTestLine line;
        line.measure = measure;
        line.median_control = median_of(a);
        line.median_treatment = median_of(b);
        try {
            line.test = stats::t_test_independent(a, b);
            line.defined = true;
        } catch (const ValidationError&) {
            line.defined = false;
        }
        return line;
    };
    rep.messages_per_conversation = t_line("messages exchanged per conversation", msg_c, msg_t);
    rep.moderator_messages = t_line("moderator messages per conversation", mod_c, mod_t);
    rep.moderator_characters = t_line("moderator characters per conversation", chars_c, chars_t);

    // Completion ~ PPS over treatment users that were offered the form.
    {
        std::vector<double> pps;
        std::vector<double> completed;
        std::vector<core::UserId> missing;
        for (const Episode* e : appeals) {
            if (!is_treatment(agg, *e) || !e->reason_present) continue;
            auto it = agg.pps_of.find(e->user);
            double value = -1.0;
            if (it != agg.pps_of.end())
                value = it->second;
            else if (model && e->model_pps >= 0.0)
                value = e->model_pps;
            if (value < 0.0) {
                missing.push_back(e->user);
                continue;
            }
            pps.push_back(value);
            completed.push_back(e->completed ? 1.0 : 0.0);
        }
        if (!missing.empty()) {
            std::string users;
            for (std::size_t i = 0; i < missing.size() && i < 10; ++i) users += " " + missing[i];
            if (missing.size() > 10) users += " ...";
            throw ValidationError("build_report: missing PPS for " + std::to_string(missing.size()) +
                                  " treatment appeals:" + users);
        }
        if (!pps.empty()) {
            Eigen::MatrixXd X(static_cast<Eigen::Index>(pps.size()), 1);
            Eigen::VectorXd y(static_cast<Eigen::Index>(pps.size()));
            for (std::size_t i = 0; i < pps.size(); ++i) {
                X(static_cast<Eigen::Index>(i), 0) = pps[i];
                y[static_cast<Eigen::Index>(i)] = completed[i];
            }
            try {
                rep.pps_regression = stats::logit_inference(X, y, {"pps"});
                rep.regression_defined = true;
                rep.odds_ratio_10pt = stats::odds_ratio(rep.pps_regression.coefficients[1].estimate, 0.1);
            } catch (const std::exception& e) {
                rep.regression_defined = false;
                rep.regression_error = e.what();
            }
        } else {
            rep.regression_defined = false;
            rep.regression_error = "no form-offered treatment appeals";
        }
    }

    // Threshold sweep over every appeal.
    {
        std::vector<toxicity::AppealObservation> observations;
        for (const Episode* e : appeals) {
            toxicity::AppealObservation o;
            o.treatment = is_treatment(agg, *e);
            o.visible = is_visible(agg, *e);
            o.completed = e->completed;
            o.score = e->appeal_score;
            observations.push_back(o);
        }
        rep.sweep = toxicity::threshold_sweep(observations, options.sweep_thresholds);
    }

    // Completion rate by appeal-toxicity class (form-offered treatment arm).
    {
        long toxic_n = 0, toxic_completed = 0, nontoxic_n = 0, nontoxic_completed = 0;
        for (const Episode* e : appeals) {
            if (!is_treatment(agg, *e) || !e->reason_present) continue;
            const bool toxic = e->appeal_score >= options.threshold;
            (toxic ? toxic_n : nontoxic_n)++;
            if (e->completed) (toxic ? toxic_completed : nontoxic_completed)++;
        }
        auto rate_ci = [](long num, long den) {
            RateWithCi r;
            r.numerator = num;
            r.denominator = den;
            if (den > 0) {
                r.defined = true;
                r.rate = static_cast<double>(num) / static_cast<double>(den);
                std::tie(r.ci_lo, r.ci_hi) = stats::proportion_ci(num, den, 0.95);
            }
            return r;
        };
        rep.completion_toxic = rate_ci(toxic_completed, toxic_n);
        rep.completion_nontoxic = rate_ci(nontoxic_completed, nontoxic_n);
    }

    // Completion durations and manual form-response labels.
    {
        std::vector<double> durations;
        for (const Episode* e : appeals) {
            if (e->completion_duration) durations.push_back(static_cast<double>(*e->completion_duration));
            if (e->manual_label) {
                ++rep.manual_labels_present;
                if (*e->manual_label) ++rep.manual_labels_toxic;
            }
        }
        if (!durations.empty()) rep.median_completion_seconds = median_of(durations);
    }

    return rep;
}

} // namespace

ExperimentReport build_report(const std::vector<EventRecord>& records, const TextScorer& scorer,
                              const ReportOptions& options, const pps::LogisticModel* model) {
    Aggregator aggregator(scorer, options.threshold, model);
    for (const auto& r : records) aggregator.observe(r);
    return build_from_aggregation(aggregator.take(), scorer, options, model);
}

ExperimentReport build_report_from_file(const std::string& path, const TextScorer& scorer,
                                        const ReportOptions& options, const pps::LogisticModel* model) {
    Aggregator aggregator(scorer, options.threshold, model);
    for_each_event(path, [&aggregator](const EventRecord& r) { aggregator.observe(r); });
    return build_from_aggregation(aggregator.take(), scorer, options, model);
}

std::pair<RateWithCi, RateWithCi> completion_rates_by_toxicity(const std::vector<EventRecord>& records,
                                                               const TextScorer& scorer, double threshold) {
    ReportOptions options;
    options.threshold = threshold;
    const ExperimentReport rep = build_report(records, scorer, options, nullptr);
    return {rep.completion_nontoxic, rep.completion_toxic};
}

namespace {

std::string pct(double fraction, int decimals = 2) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(decimals) << 100.0 * fraction << "%";
    return out.str();
}

std::string num(double v, int decimals = 3) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(decimals) << v;
    return out.str();
}

std::string pval(double p) {
    std::ostringstream out;
    if (p < 1e-4)
        out << std::scientific << std::setprecision(2) << p;
    else
        out << std::fixed << std::setprecision(3) << p;
    return out.str();
}

std::string chi_line(const HypothesisResult& h, long n) {
    if (!h.defined) return h.id + ": not defined (" + h.note + ")";
    std::ostringstream out;
    out << h.id << " (" << h.measure << "): chi2(1, N=" << n << ") = " << num(h.test.statistic, 2)
        << ", p = " << pval(h.test.p);
    return out.str();
}

} // namespace

std::string render_markdown(const ExperimentReport& rep) {
    std::ostringstream md;
    md << "# Appeal workflow experiment report\n\n";
    md << "Active toxicity threshold: " << rep.options.threshold << "\n\n";

    md << "## Workload\n\n";
    md << "|  | Control | Treatment |\n|---|---|---|\n";
    md << "| Appeals | " << rep.control.total << " | " << rep.treatment.total << " |\n";
    md << "| Appeals visible | " << rep.control.visible << " | " << rep.treatment.visible << " |\n";
    md << "| Appeals responded to | " << rep.control.responded << " | " << rep.treatment.responded
       << " |\n";
    md << "| Bypassed (missing ban reason) | " << rep.control.bypassed << " | " << rep.treatment.bypassed
       << " |\n";
    const auto& h2a = rep.h2a_toxic_visible.table;
    md << "| Toxic share of visible appeals | " << pct(rep.control.visible > 0 ? double(h2a.a) / rep.control.visible : 0.0)
       << " (" << h2a.a << "/" << rep.control.visible << ") | "
       << pct(rep.treatment.visible > 0 ? double(h2a.c) / rep.treatment.visible : 0.0) << " (" << h2a.c
       << "/" << rep.treatment.visible << ") |\n\n";

    md << "## Outcomes\n\n";
    md << "|  | Control | Treatment |\n|---|---|---|\n";
    md << "| Moderator response rate on visible appeals | " << pct(rep.response_rate_control) << " | "
       << pct(rep.response_rate_treatment) << " |\n";
    md << "| Median messages exchanged per responded conversation | "
       << num(rep.messages_per_conversation.median_control, 0) << " | "
       << num(rep.messages_per_conversation.median_treatment, 0) << " |\n";
    md << "| Median moderator messages | " << num(rep.moderator_messages.median_control, 0) << " | "
       << num(rep.moderator_messages.median_treatment, 0) << " |\n";
    md << "| Median moderator characters | " << num(rep.moderator_characters.median_control, 0) << " | "
       << num(rep.moderator_characters.median_treatment, 0) << " |\n";
    md << "| Appeals granted | " << rep.control.granted << " | " << rep.treatment.granted << " |\n\n";

    md << "## Hypothesis tests\n\n";
    md << "- " << chi_line(rep.h1a_visible, rep.control.total + rep.treatment.total) << "\n";
    md << "- " << chi_line(rep.h1b_responded, rep.control.total + rep.treatment.total) << "\n";
    md << "- " << chi_line(rep.h2a_toxic_visible, rep.control.visible + rep.treatment.visible) << "\n";
    md << "- "
       << chi_line(rep.h2b_followup_toxicity,
                   rep.followup_messages_control + rep.followup_messages_treatment)
       << "\n";
    md << "- " << chi_line(rep.h3a_grants, rep.control.total + rep.treatment.total) << "\n";
    md << "- " << chi_line(rep.h3b_response_rate, rep.control.visible + rep.treatment.visible) << "\n";
    auto t_line = [&](const TTestLine& line) {
        if (!line.defined) return std::string("- ") + line.measure + ": not defined\n";
        std::ostringstream out;
        out << "- " << line.measure << ": t(" << static_cast<long>(line.test.df) << ") = "
            << num(line.test.statistic, 2) << ", p = " << pval(line.test.p) << "\n";
        return out.str();
    };
    md << t_line(rep.messages_per_conversation);
    md << t_line(rep.moderator_messages);
    md << t_line(rep.moderator_characters);
    md << "\n";

    md << "## Completion ~ PPS regression (treatment arm)\n\n";
    if (rep.regression_defined) {
        md << "| Coefficient | Estimate | Std. error | z | p |  |\n|---|---|---|---|---|---|\n";
        for (const auto& c : rep.pps_regression.coefficients) {
            md << "| " << c.name << " | " << num(c.estimate) << " | " << num(c.std_error) << " | "
               << num(c.z, 2) << " | " << pval(c.p) << " | " << c.stars << " |\n";
        }
        md << "\nAIC " << num(rep.pps_regression.aic) << ", n = " << rep.pps_regression.n << ". ";
        md << "A 10-point PPS increase multiplies completion odds by " << num(rep.odds_ratio_10pt)
           << ".\n\n";
    } else {
        md << "Not available: " << rep.regression_error << "\n\n";
    }

    md << "## Toxicity threshold sweep\n\n";
    md << "| Threshold | Toxic in control | Toxic in treatment | Toxic completed | Rate in control | "
          "Rate after process |\n|---|---|---|---|---|---|\n";
    for (const auto& row : rep.sweep) {
        md << "| " << row.threshold << " | " << row.control_toxic << " | " << row.treatment_toxic
           << " | " << row.completed_toxic << " | " << pct(row.control_rate) << " | "
           << pct(row.after_process_rate) << " |\n";
    }
    md << "\n";

    md << "## Completion by appeal toxicity (treatment arm)\n\n";
    auto rate_line = [&](const char* label, const RateWithCi& r) {
        std::ostringstream out;
        out << "- " << label << ": ";
        if (!r.defined)
            out << "undefined (no appeals in class)\n";
        else
            out << pct(r.rate, 1) << " (" << r.numerator << "/" << r.denominator << "), 95% CI ["
                << pct(r.ci_lo, 1) << ", " << pct(r.ci_hi, 1) << "]\n";
        return out.str();
    };
    md << rate_line("non-toxic appeals completed", rep.completion_nontoxic);
    md << rate_line("toxic appeals completed", rep.completion_toxic);
    md << "\n";

    if (rep.median_completion_seconds)
        md << "Median form completion time: " << num(*rep.median_completion_seconds, 0) << " s\n\n";
    if (rep.manual_labels_present > 0)
        md << "Manually rated form responses: " << rep.manual_labels_toxic << " toxic of "
           << rep.manual_labels_present << " rated\n\n";

    md << "---\n";
    md << "Notes: all 2x2 statistics are recomputed from the event log with Yates continuity "
          "correction; none are imported from external sources. T-test degrees of freedom derive "
          "from the observed per-group conversation counts. Bypassed appeals (missing ban reason) "
          "count as visible in every table and are excluded from the completion regression, which "
          "covers only users who were offered the form.\n";
    return md.str();
}

void write_csv_tables(const ExperimentReport& rep, const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    auto open = [&directory](const std::string& name) {
        std::ofstream out(fs::path(directory) / name);
        if (!out) throw std::runtime_error("cannot write " + name + " in " + directory);
        return out;
    };

    {
        auto out = open("workload.csv");
        out << "measure,control,treatment\n";
        out << "appeals," << rep.control.total << "," << rep.treatment.total << "\n";
        out << "visible," << rep.control.visible << "," << rep.treatment.visible << "\n";
        out << "responded," << rep.control.responded << "," << rep.treatment.responded << "\n";
        out << "bypassed," << rep.control.bypassed << "," << rep.treatment.bypassed << "\n";
        out << "toxic_visible," << rep.h2a_toxic_visible.table.a << "," << rep.h2a_toxic_visible.table.c
            << "\n";
    }
    {
        auto out = open("outcomes.csv");
        out << "measure,control,treatment\n";
        out << std::setprecision(17);
        out << "response_rate," << rep.response_rate_control << "," << rep.response_rate_treatment << "\n";
        out << "median_messages," << rep.messages_per_conversation.median_control << ","
            << rep.messages_per_conversation.median_treatment << "\n";
        out << "median_moderator_messages," << rep.moderator_messages.median_control << ","
            << rep.moderator_messages.median_treatment << "\n";
        out << "median_moderator_characters," << rep.moderator_characters.median_control << ","
            << rep.moderator_characters.median_treatment << "\n";
        out << "granted," << rep.control.granted << "," << rep.treatment.granted << "\n";
    }
    {
        auto out = open("hypotheses.csv");
        out << "id,measure,defined,a,b,c,d,statistic,df,p\n";
        out << std::setprecision(17);
        for (const auto* h : {&rep.h1a_visible, &rep.h1b_responded, &rep.h2a_toxic_visible,
                              &rep.h2b_followup_toxicity, &rep.h3a_grants, &rep.h3b_response_rate}) {
            out << h->id << "," << '"' << h->measure << '"' << "," << (h->defined ? 1 : 0) << ","
                << h->table.a << "," << h->table.b << "," << h->table.c << "," << h->table.d << ","
                << h->test.statistic << "," << h->test.df << "," << h->test.p << "\n";
        }
        for (const auto* t : {&rep.messages_per_conversation, &rep.moderator_messages,
                              &rep.moderator_characters}) {
            out << "t-test," << '"' << t->measure << '"' << "," << (t->defined ? 1 : 0) << ",,,,,"
                << t->test.statistic << "," << t->test.df << "," << t->test.p << "\n";
        }
    }
    {
        auto out = open("regression.csv");
        out << "coefficient,estimate,std_error,z,p,stars\n";
        out << std::setprecision(17);
        if (rep.regression_defined) {
            for (const auto& c : rep.pps_regression.coefficients)
                out << c.name << "," << c.estimate << "," << c.std_error << "," << c.z << "," << c.p
                    << "," << c.stars << "\n";
            out << "aic," << rep.pps_regression.aic << ",,,,\n";
            out << "n," << rep.pps_regression.n << ",,,,\n";
        }
    }
    {
        auto out = open("sweep.csv");
        out << "threshold,control_toxic,treatment_toxic,completed_toxic,control_rate,after_process_rate\n";
        out << std::setprecision(17);
        for (const auto& row : rep.sweep)
            out << row.threshold << "," << row.control_toxic << "," << row.treatment_toxic << ","
                << row.completed_toxic << "," << row.control_rate << "," << row.after_process_rate
                << "\n";
    }
    {
        auto out = open("completion_by_toxicity.csv");
        out << "class,completed,total,rate,ci_lo,ci_hi\n";
        out << std::setprecision(17);
        for (const auto* r : {&rep.completion_nontoxic, &rep.completion_toxic}) {
            out << (r == &rep.completion_nontoxic ? "nontoxic" : "toxic") << "," << r->numerator << ","
                << r->denominator << "," << r->rate << "," << r->ci_lo << "," << r->ci_hi << "\n";
        }
    }
}

} // namespace appealgate::experiment
