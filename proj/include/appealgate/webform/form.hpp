#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "appealgate/core/types.hpp"
#include "appealgate/experiment/event_log.hpp"

namespace appealgate::webform {

struct FormQuestion {
    std::string key;
    std::string prompt;
    bool open_text = true;
    std::vector<std::string> options; // multiple-choice only
    std::vector<int> answer_key;      // indices of keyed-permissible options
};

// Five questions: copy the ban reason, describe the actions and
// circumstances, future steps, the rule in the user's own words, and a
// comment-labeling task with exactly two keyed options.
struct FormDefinition {
    std::vector<FormQuestion> questions;

    void validate() const; // throws ValidationError on structural problems
    static FormDefinition builtin_default();
};

struct Answer {
    std::string text;          // open-text questions
    std::vector<int> selected; // multiple-choice questions
};

struct FormSubmission {
    core::UserId user;
    std::vector<Answer> answers; // aligned with FormDefinition::questions
    core::Timestamp started_at = 0;
    core::Timestamp submitted_at = 0;
    std::optional<bool> manual_toxicity_label; // set by a human rater, stored only

    core::Timestamp duration() const { return submitted_at - started_at; }
};

// Per-user access control, single immutable submission, cursor-polled
// retrieval, and a simulated outage toggle.
class FormService {
public:
    using Clock = std::function<core::Timestamp()>;

    FormService(FormDefinition definition, experiment::EventSink& log, Clock clock = nullptr);

    const FormDefinition& definition() const { return definition_; }

    void grant_access(const core::UserId& user); // idempotent
    bool has_access(const core::UserId& user) const { return grants_.count(user) > 0; }

    // Validates, stores immutably, logs form_submit. Throws ValidationError
    // on access violations, resubmission, or malformed answers.
    const FormSubmission& submit(const core::UserId& user, std::vector<Answer> answers,
                                 core::Timestamp started_at, core::Timestamp submitted_at);

    // Submissions recorded after the cursor, in submission order. Throws
    // OutageError while the outage flag is set; nothing is lost or
    // re-delivered across outage boundaries.
    std::pair<std::vector<const FormSubmission*>, std::uint64_t> poll_completed(std::uint64_t cursor) const;

    void set_outage(bool down);
    bool outage() const { return outage_; }

    const FormSubmission* submission_for(const core::UserId& user) const;
    void set_manual_label(const core::UserId& user, bool toxic);

private:
    FormDefinition definition_;
    experiment::EventSink& log_;
    Clock clock_;
    std::set<core::UserId> grants_;
    std::map<core::UserId, FormSubmission> submissions_;
    std::vector<core::UserId> submission_order_;
    bool outage_ = false;
};

// Trim trailing/leading whitespace and normalize \r\n to \n.
std::string normalize_answer_text(const std::string& text);

} // namespace appealgate::webform
