#include "appealgate/cli/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "appealgate/common/errors.hpp"

namespace appealgate::cli {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) throw ValidationError("config: " + where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key))
            throw ValidationError("config: unknown key \"" + key + "\" in " + where);
    }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

webform::FormDefinition parse_form(const json& j) {
    webform::FormDefinition def;
    for (const auto& q : j.at("questions")) {
        require_keys(q, {"key", "prompt", "type", "options", "answer_key"}, "form.questions[]");
        webform::FormQuestion question;
        question.key = q.at("key").get<std::string>();
        question.prompt = q.at("prompt").get<std::string>();
        const std::string type = q.value("type", "open_text");
        if (type == "open_text") {
            question.open_text = true;
        } else if (type == "multiple_choice") {
            question.open_text = false;
            question.options = q.at("options").get<std::vector<std::string>>();
            question.answer_key = q.at("answer_key").get<std::vector<int>>();
        } else {
            throw ValidationError("config: unknown question type " + type);
        }
        def.questions.push_back(std::move(question));
    }
    def.validate();
    return def;
}

} // namespace

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: parse error: ") + e.what());
    }

    require_keys(j, {"assignment", "bot", "form", "toxicity", "pps", "behavior"}, "top level");
    Config cfg;

    if (j.contains("assignment")) {
        const auto& a = j.at("assignment");
        require_keys(a, {"ratio", "seed"}, "assignment");
        maybe(a, "ratio", cfg.assignment_ratio);
        maybe(a, "seed", cfg.assignment_seed);
        if (cfg.assignment_ratio < 0.0 || cfg.assignment_ratio > 1.0)
            throw ValidationError("config: assignment.ratio must be in [0, 1]");
    }

    if (j.contains("bot")) {
        const auto& b = j.at("bot");
        require_keys(b,
                     {"form_invitation", "reminder", "handover", "outage_user_notice",
                      "outage_moderator_note", "form_url_base", "outage_user_notice_enabled",
                      "ops_conversation"},
                     "bot");
        maybe(b, "form_invitation", cfg.engine.templates.form_invitation);
        maybe(b, "reminder", cfg.engine.templates.reminder);
        maybe(b, "handover", cfg.engine.templates.handover);
        maybe(b, "outage_user_notice", cfg.engine.templates.outage_user_notice);
        maybe(b, "outage_moderator_note", cfg.engine.templates.outage_moderator_note);
        maybe(b, "form_url_base", cfg.engine.form_url_base);
        maybe(b, "outage_user_notice_enabled", cfg.engine.outage_user_notice_enabled);
        maybe(b, "ops_conversation", cfg.engine.ops_conversation);
    }

    if (j.contains("form")) {
        require_keys(j.at("form"), {"questions"}, "form");
        cfg.form = parse_form(j.at("form"));
    }

    if (j.contains("toxicity")) {
        const auto& t = j.at("toxicity");
        require_keys(t, {"backend", "lexicon_path", "threshold", "remote_url", "remote_timeout_ms",
                         "remote_max_retries"},
                     "toxicity");
        maybe(t, "backend", cfg.toxicity_backend);
        maybe(t, "lexicon_path", cfg.lexicon_path);
        maybe(t, "threshold", cfg.toxicity_threshold);
        maybe(t, "remote_url", cfg.remote.url);
        maybe(t, "remote_timeout_ms", cfg.remote.timeout_ms);
        maybe(t, "remote_max_retries", cfg.remote.max_retries);
        if (cfg.toxicity_backend != "lexicon" && cfg.toxicity_backend != "remote")
            throw ValidationError("config: toxicity.backend must be lexicon or remote");
        if (cfg.toxicity_threshold <= 0.0 || cfg.toxicity_threshold >= 1.0)
            throw ValidationError("config: toxicity.threshold must be in (0, 1)");
    }

    if (j.contains("pps")) {
        const auto& p = j.at("pps");
        require_keys(p, {"min_df", "l2", "cv_folds", "cv_seed"}, "pps");
        maybe(p, "min_df", cfg.pps_min_df);
        maybe(p, "l2", cfg.pps_l2);
        maybe(p, "cv_folds", cfg.pps_cv_folds);
        maybe(p, "cv_seed", cfg.pps_cv_seed);
        if (cfg.pps_min_df < 1) throw ValidationError("config: pps.min_df must be >= 1");
        if (cfg.pps_l2 < 0.0) throw ValidationError("config: pps.l2 must be >= 0");
        if (cfg.pps_cv_folds < 2) throw ValidationError("config: pps.cv_folds must be >= 2");
    }

    if (j.contains("behavior")) {
        const auto& b = j.at("behavior");
        require_keys(b,
                     {"n_users", "seed", "pps_alpha", "pps_beta", "toxic_prob", "severe_prob",
                      "mild_prob", "completion_b0", "completion_b1", "completion_btox",
                      "respond_control", "respond_treatment", "grant_base", "grant_pps",
                      "grant_complete", "grant_target", "missing_reason_prob", "followup_toxic_prob",
                      "mute_prob", "extra_user_messages_q", "mod_messages_q", "abandoned_messages_q",
                      "mod_chars_median_control", "mod_chars_median_treatment", "mod_chars_sigma",
                      "median_completion_seconds", "completion_sigma"},
                     "behavior");
        auto& c = cfg.behavior;
        maybe(b, "n_users", c.n_users);
        maybe(b, "seed", c.seed);
        maybe(b, "pps_alpha", c.pps_alpha);
        maybe(b, "pps_beta", c.pps_beta);
        maybe(b, "toxic_prob", c.toxic_prob);
        maybe(b, "severe_prob", c.severe_prob);
        maybe(b, "mild_prob", c.mild_prob);
        maybe(b, "completion_b0", c.completion_b0);
        maybe(b, "completion_b1", c.completion_b1);
        maybe(b, "completion_btox", c.completion_btox);
        maybe(b, "respond_control", c.respond_control);
        maybe(b, "respond_treatment", c.respond_treatment);
        maybe(b, "grant_base", c.grant_base);
        maybe(b, "grant_pps", c.grant_pps);
        maybe(b, "grant_complete", c.grant_complete);
        maybe(b, "grant_target", c.grant_target);
        maybe(b, "missing_reason_prob", c.missing_reason_prob);
        maybe(b, "followup_toxic_prob", c.followup_toxic_prob);
        maybe(b, "mute_prob", c.mute_prob);
        maybe(b, "extra_user_messages_q", c.extra_user_messages_q);
        maybe(b, "mod_messages_q", c.mod_messages_q);
        maybe(b, "abandoned_messages_q", c.abandoned_messages_q);
        maybe(b, "mod_chars_median_control", c.mod_chars_median_control);
        maybe(b, "mod_chars_median_treatment", c.mod_chars_median_treatment);
        maybe(b, "mod_chars_sigma", c.mod_chars_sigma);
        maybe(b, "median_completion_seconds", c.median_completion_seconds);
        maybe(b, "completion_sigma", c.completion_sigma);
        for (double p : {c.toxic_prob, c.severe_prob, c.mild_prob, c.respond_control,
                         c.respond_treatment, c.missing_reason_prob, c.followup_toxic_prob, c.mute_prob})
            if (p < 0.0 || p > 1.0)
                throw ValidationError("config: behavior probabilities must be in [0, 1]");
        if (c.pps_alpha <= 0.0 || c.pps_beta <= 0.0)
            throw ValidationError("config: behavior pps Beta parameters must be positive");
    }

    return cfg;
}

toxicity::LexiconScorer Config::make_lexicon() const {
    if (lexicon_path.empty()) return toxicity::LexiconScorer::builtin_default();
    return toxicity::LexiconScorer::load(lexicon_path);
}

} // namespace appealgate::cli
