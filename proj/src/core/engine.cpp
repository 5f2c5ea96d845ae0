#include "appealgate/core/engine.hpp"

#include <sstream>

#include "appealgate/common/errors.hpp"

namespace appealgate::core {

using experiment::EventType;

AppealEngine::AppealEngine(platform::PlatformOps& platform, webform::FormService& form,
                           experiment::AssignmentStore& assignments, experiment::EventSink& log,
                           EngineConfig config)
    : platform_(platform), form_(form), assignments_(assignments), log_(log), config_(std::move(config)) {}

std::string AppealEngine::fill_template(const std::string& tmpl, const UserId& user) const {
    const std::string url = config_.form_url_base + "/" + user;
    std::string out = tmpl;
    const std::string placeholder = "{form_url}";
    for (auto pos = out.find(placeholder); pos != std::string::npos; pos = out.find(placeholder))
        out.replace(pos, placeholder.size(), url);
    return out;
}

void AppealEngine::pump() {
    auto [events, next] = platform_.fetch_new_events(platform_cursor_);
    for (const auto& event : events) handle_event(event);
    platform_cursor_ = next;
    poll_forms();
}

void AppealEngine::apply_actions(const ConversationId& conversation, const BotActions& actions) {
    for (const auto& action : actions) {
        nlohmann::json payload;
        payload["action"] = to_string(action.kind);
        switch (action.kind) {
            case BotActionKind::Reply:
                platform_.send_message(conversation, action.body);
                payload["body"] = action.body;
                break;
            case BotActionKind::Archive:
                platform_.archive(conversation);
                break;
            case BotActionKind::Unarchive:
                platform_.unarchive(conversation);
                break;
            case BotActionKind::PostPrivateNote:
                platform_.add_private_note(conversation, action.body);
                payload["body"] = action.body;
                break;
            case BotActionKind::None:
                continue;
        }
        const UserId participant =
            platform_.has_conversation(conversation) ? platform_.conversation(conversation).participant : "";
        log_.append(EventType::BotAction, platform_.now(), conversation, participant, std::move(payload));
    }
}

BotActions AppealEngine::handle_event(const platform::PlatformEvent& event) {
    const Message& message = event.message;
    if (!platform_.has_conversation(message.conversation))
        throw NotFoundError("orphan event: unknown conversation " + message.conversation);
    if (processed_.count(message.id)) return {}; // replayed event
    processed_.insert(message.id);

    if (message.sender != Role::BannedUser) return {}; // bot/moderator traffic carries no transitions

    const BanRecord* ban = platform_.ban_for(message.conversation);

    auto it = appeals_.find(message.conversation);
    if (it != appeals_.end()) return on_subsequent_message(it->second, message.conversation);

    // Messages from users who are not permanently banned are ignored.
    if (ban == nullptr || !ban->permanent) return {};

    // A user with an open appeal elsewhere does not get a second appeal;
    // their message is a subsequent message of the open one.
    auto open = open_by_user_.find(ban->user);
    if (open != open_by_user_.end())
        return on_subsequent_message(appeals_.at(open->second), message.conversation);

    return on_first_appeal(ban->user, event);
}

BotActions AppealEngine::on_first_appeal(const UserId& user, const platform::PlatformEvent& event) {
    const Message& message = event.message;
    const BanRecord* ban = platform_.ban_for(message.conversation);

    const experiment::Assignment& assignment = assignments_.assign(user, platform_.now());

    AppealRecord record;
    record.user = user;
    record.conversation = message.conversation;
    record.group = assignment.group;
    record.first_message_id = message.id;
    record.created_at = platform_.now();

    BotActions actions;
    if (assignment.group == Group::Control) {
        record.state.kind = StateKind::ControlOpen;
    } else if (ban && !ban->reason.has_value()) {
        // Missing ban reason: pointless to quiz the user about it, so the
        // appeal goes straight to moderators.
        record.state.kind = StateKind::Bypassed;
        record.bypassed = true;
    } else {
        record.state.kind = StateKind::TreatmentAwaitingForm;
        form_.grant_access(user);
        nlohmann::json payload;
        payload["conversation"] = message.conversation;
        log_.append(EventType::FormGrant, platform_.now(), message.conversation, user, std::move(payload));
        actions = {BotAction::reply(fill_template(config_.templates.form_invitation, user)),
                   BotAction::archive()};
    }

    appeals_.emplace(message.conversation, record);
    appeal_order_.push_back(message.conversation);
    open_by_user_[user] = message.conversation;
    apply_actions(message.conversation, actions);
    return actions;
}

BotActions AppealEngine::on_subsequent_message(AppealRecord& record, const ConversationId& acting) {
    BotActions actions;
    if (record.state.kind == StateKind::TreatmentAwaitingForm) {
        actions = {BotAction::reply(fill_template(config_.templates.reminder, record.user)),
                   BotAction::archive()};
    }
    // Completed, bypassed, control, and decided appeals get silence.
    apply_actions(acting, actions);
    return actions;
}

BotActions AppealEngine::on_form_completed(const webform::FormSubmission& submission) {
    auto open = open_by_user_.find(submission.user);
    if (open == open_by_user_.end()) return {};
    AppealRecord& record = appeals_.at(open->second);
    if (record.state.kind != StateKind::TreatmentAwaitingForm) return {}; // duplicate completion

    record.state.kind = StateKind::TreatmentCompleted;
    record.completed = true;
    record.completed_at = submission.submitted_at;

    const BotActions actions = {BotAction::unarchive(),
                                BotAction::note(render_summary_note(submission)),
                                BotAction::reply(fill_template(config_.templates.handover, record.user))};
    apply_actions(record.conversation, actions);
    return actions;
}

void AppealEngine::poll_forms() {
    try {
        auto [submissions, next] = form_.poll_completed(form_cursor_);
        outage_noted_ = false;
        for (const auto* submission : submissions) on_form_completed(*submission);
        form_cursor_ = next;
    } catch (const OutageError&) {
        if (outage_noted_) return; // one note per outage episode
        outage_noted_ = true;
        platform_.ensure_conversation(config_.ops_conversation, "moderators");
        apply_actions(config_.ops_conversation,
                      {BotAction::note(config_.templates.outage_moderator_note)});
        if (config_.outage_user_notice_enabled) {
            for (const auto& conversation : appeal_order_) {
                const AppealRecord& record = appeals_.at(conversation);
                if (record.state.kind == StateKind::TreatmentAwaitingForm)
                    apply_actions(conversation,
                                  {BotAction::reply(config_.templates.outage_user_notice)});
            }
        }
    }
}

const AppealRecord& AppealEngine::record_decision(const ConversationId& conversation, Decision decision,
                                                  std::optional<int> mute_days) {
    auto it = appeals_.find(conversation);
    if (it == appeals_.end()) throw NotFoundError("no appeal for conversation " + conversation);
    AppealRecord& record = it->second;
    if (record.state.terminal())
        throw ValidationError("already decided: " + conversation);
    if (decision == Decision::Muted) {
        if (!mute_days || *mute_days < 1 || *mute_days > 28)
            throw ValidationError("mute requires mute_days in [1, 28]");
    } else if (mute_days) {
        throw ValidationError("mute_days only valid for mute decisions");
    }

    record.state.kind = StateKind::Decided;
    record.state.decision = decision;
    record.decided_at = platform_.now();
    open_by_user_.erase(record.user);
    if (decision == Decision::Muted) platform_.mute(record.user, *mute_days);

    nlohmann::json payload;
    payload["decision"] = to_string(decision);
    if (mute_days) payload["mute_days"] = *mute_days;
    log_.append(EventType::Decision, platform_.now(), conversation, record.user, std::move(payload));
    return record;
}

std::string AppealEngine::render_summary_note(const webform::FormSubmission& submission) const {
    const auto& questions = form_.definition().questions;
    if (submission.answers.size() != questions.size())
        throw ValidationError("submission does not match form definition");
    std::ostringstream out;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        const auto& q = questions[i];
        const auto& a = submission.answers[i];
        out << "**" << q.prompt << "**\n";
        if (q.open_text) {
            out << webform::normalize_answer_text(a.text) << "\n";
        } else {
            int matched = 0;
            for (int idx : a.selected) {
                out << "- " << q.options[static_cast<std::size_t>(idx)] << "\n";
                for (int keyed : q.answer_key)
                    if (keyed == idx) ++matched;
            }
            out << "(" << matched << " of " << q.answer_key.size()
                << " keyed-permissible comments selected)\n";
        }
        if (i + 1 < questions.size()) out << "\n";
    }
    return out.str();
}

const AppealRecord* AppealEngine::appeal_for(const ConversationId& conversation) const {
    auto it = appeals_.find(conversation);
    return it == appeals_.end() ? nullptr : &it->second;
}

const AppealRecord* AppealEngine::open_appeal_for_user(const UserId& user) const {
    auto it = open_by_user_.find(user);
    if (it == open_by_user_.end()) return nullptr;
    return &appeals_.at(it->second);
}

nlohmann::json AppealEngine::snapshot() const {
    nlohmann::json appeals = nlohmann::json::array();
    for (const auto& conversation : appeal_order_) {
        const AppealRecord& r = appeals_.at(conversation);
        nlohmann::json j;
        j["user"] = r.user;
        j["conversation"] = r.conversation;
        j["group"] = to_string(r.group);
        j["state"] = to_string(r.state.kind);
        if (r.state.decision) j["decision"] = to_string(*r.state.decision);
        j["first_message_id"] = r.first_message_id;
        j["created_at"] = r.created_at;
        if (r.completed_at) j["completed_at"] = *r.completed_at;
        if (r.decided_at) j["decided_at"] = *r.decided_at;
        j["bypassed"] = r.bypassed;
        j["completed"] = r.completed;
        appeals.push_back(std::move(j));
    }
    nlohmann::json j;
    j["appeals"] = std::move(appeals);
    j["platform_cursor"] = platform_cursor_;
    j["form_cursor"] = form_cursor_;
    return j;
}

} // namespace appealgate::core
