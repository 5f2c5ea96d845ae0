#include "appealgate/webform/form.hpp"

#include <algorithm>

#include "appealgate/common/errors.hpp"

namespace appealgate::webform {

using experiment::EventType;

void FormDefinition::validate() const {
    if (questions.size() != 5)
        throw ValidationError("form definition must have exactly 5 questions");
    int choice_questions = 0;
    for (const auto& q : questions) {
        if (q.key.empty() || q.prompt.empty())
            throw ValidationError("form question needs key and prompt");
        if (q.open_text) {
            if (!q.options.empty() || !q.answer_key.empty())
                throw ValidationError("open-text question must not carry options: " + q.key);
        } else {
            ++choice_questions;
            if (q.options.size() != 5)
                throw ValidationError("comment-labeling question needs exactly 5 options: " + q.key);
            if (q.answer_key.size() != 2)
                throw ValidationError("comment-labeling question needs exactly 2 keyed options: " + q.key);
            for (int idx : q.answer_key)
                if (idx < 0 || idx >= static_cast<int>(q.options.size()))
                    throw ValidationError("answer key index out of range: " + q.key);
        }
    }
    if (choice_questions != 1)
        throw ValidationError("form definition needs exactly one multiple-choice question");
}

FormDefinition FormDefinition::builtin_default() {
    FormDefinition def;
    def.questions = {
        {"copy_ban_reason",
         "Copy and paste the reason shown in the ban message you received.",
         true, {}, {}},
        {"actions_and_circumstances",
         "Describe what you did that led to the ban, and what was going on when you did it.",
         true, {}, {}},
        {"future_steps",
         "What will you do differently to make sure this does not happen again?",
         true, {}, {}},
        {"rule_in_own_words",
         "In your own words, describe the rule you broke.",
         true, {}, {}},
        {"comment_labeling",
         "Which of the following comments do you think should be allowed in this community?",
         false,
         {"You clearly didn't read the rules before posting garbage like this.",
          "This is a repost and it adds nothing. Downvoted.",
          "People who post stuff like this should be banned forever. You're worthless.",
          "I disagree with the mods here, but I can see why the post was removed.",
          "Everyone from that other community is subhuman and should get out."},
         {1, 3}},
    };
    return def;
}

std::string normalize_answer_text(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
        out.push_back(text[i] == '\r' ? '\n' : text[i]);
    }
    const auto first = out.find_first_not_of(" \t\n");
    if (first == std::string::npos) return "";
    const auto last = out.find_last_not_of(" \t\n");
    return out.substr(first, last - first + 1);
}

FormService::FormService(FormDefinition definition, experiment::EventSink& log, Clock clock)
    : definition_(std::move(definition)), log_(log), clock_(std::move(clock)) {
    definition_.validate();
}

void FormService::grant_access(const core::UserId& user) { grants_.insert(user); }

const FormSubmission& FormService::submit(const core::UserId& user, std::vector<Answer> answers,
                                          core::Timestamp started_at, core::Timestamp submitted_at) {
    if (!grants_.count(user))
        throw ValidationError("form access denied for user " + user);
    if (submissions_.count(user))
        throw ValidationError("already submitted: " + user);
    if (submitted_at < started_at)
        throw ValidationError("submitted_at precedes started_at");
    if (answers.size() != definition_.questions.size())
        throw ValidationError("answer count does not match form definition");

    for (std::size_t i = 0; i < answers.size(); ++i) {
        const auto& q = definition_.questions[i];
        auto& a = answers[i];
        if (q.open_text) {
            a.text = normalize_answer_text(a.text);
            if (a.text.empty())
                throw ValidationError("empty answer for question " + q.key);
            if (!a.selected.empty())
                throw ValidationError("option selection on open-text question " + q.key);
        } else {
            if (a.selected.empty())
                throw ValidationError("no option selected for question " + q.key);
            std::sort(a.selected.begin(), a.selected.end());
            a.selected.erase(std::unique(a.selected.begin(), a.selected.end()), a.selected.end());
            for (int idx : a.selected)
                if (idx < 0 || idx >= static_cast<int>(q.options.size()))
                    throw ValidationError("selected option out of range for question " + q.key);
        }
    }

    FormSubmission sub;
    sub.user = user;
    sub.answers = std::move(answers);
    sub.started_at = started_at;
    sub.submitted_at = submitted_at;

    nlohmann::json payload;
    payload["started_at"] = started_at;
    payload["submitted_at"] = submitted_at;
    payload["duration"] = sub.duration();
    nlohmann::json janswers = nlohmann::json::array();
    for (std::size_t i = 0; i < sub.answers.size(); ++i) {
        nlohmann::json ja;
        ja["key"] = definition_.questions[i].key;
        if (definition_.questions[i].open_text)
            ja["text"] = sub.answers[i].text;
        else
            ja["selected"] = sub.answers[i].selected;
        janswers.push_back(std::move(ja));
    }
    payload["answers"] = std::move(janswers);
    log_.append(EventType::FormSubmit, submitted_at, "", user, std::move(payload));

    auto [it, inserted] = submissions_.emplace(user, std::move(sub));
    (void)inserted;
    submission_order_.push_back(user);
    return it->second;
}

std::pair<std::vector<const FormSubmission*>, std::uint64_t>
FormService::poll_completed(std::uint64_t cursor) const {
    if (outage_)
        throw OutageError("form service unavailable");
    if (cursor > submission_order_.size())
        throw ValidationError("poll_completed: invalid cursor");
    std::vector<const FormSubmission*> out;
    for (std::size_t i = cursor; i < submission_order_.size(); ++i)
        out.push_back(&submissions_.at(submission_order_[i]));
    return {std::move(out), submission_order_.size()};
}

void FormService::set_outage(bool down) {
    if (down == outage_) return;
    outage_ = down;
    nlohmann::json payload;
    payload["service"] = "webform";
    payload["down"] = down;
    log_.append(EventType::Outage, clock_ ? clock_() : 0, "", "", std::move(payload));
}

const FormSubmission* FormService::submission_for(const core::UserId& user) const {
    auto it = submissions_.find(user);
    return it == submissions_.end() ? nullptr : &it->second;
}

void FormService::set_manual_label(const core::UserId& user, bool toxic) {
    auto it = submissions_.find(user);
    if (it == submissions_.end()) throw NotFoundError("no submission for user " + user);
    it->second.manual_toxicity_label = toxic;
}

} // namespace appealgate::webform
