#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "appealgate/core/types.hpp"
#include "appealgate/experiment/assignment.hpp"
#include "appealgate/experiment/event_log.hpp"
#include "appealgate/platform/platform.hpp"
#include "appealgate/webform/form.hpp"

namespace appealgate::core {

struct BotTemplates {
    std::string form_invitation =
        "Thanks for your appeal. Before a moderator reviews it, please complete this short "
        "review form: {form_url}. Your appeal is forwarded to the team as soon as the form "
        "comes in.";
    std::string reminder =
        "Your appeal is still waiting on the review form: {form_url}. Moderators will see "
        "this conversation once the form is in.";
    std::string handover =
        "Thanks, your responses were received. Your appeal is now with the moderator team "
        "and they will reply here.";
    std::string outage_user_notice =
        "We are having a temporary technical problem retrieving review forms. Your "
        "submission is safe; please bear with us while this is fixed.";
    std::string outage_moderator_note =
        "Form service is unreachable; completed forms will be picked up automatically once "
        "it recovers.";
};

struct EngineConfig {
    BotTemplates templates;
    std::string form_url_base = "https://forms.example/appeal";
    bool outage_user_notice_enabled = true;
    std::string ops_conversation = "ops"; // where outage notes for moderators land
};

// The dialogue-flow state machine. Consumes platform events one at a time,
// transitions the per-conversation appeal record, and performs/logs exactly
// the bot actions the flow prescribes.
class AppealEngine {
public:
    AppealEngine(platform::PlatformOps& platform, webform::FormService& form,
                 experiment::AssignmentStore& assignments, experiment::EventSink& log,
                 EngineConfig config);

    // Drain the platform queue, then poll the form service once.
    void pump();

    // Returns the actions taken. Replayed events (same message id) are no-ops.
    BotActions handle_event(const platform::PlatformEvent& event);

    // One poll; exactly-once delivery across outages. On the first failed
    // poll of an outage episode: one private note to moderators, plus an
    // optional status reply in every form-awaiting conversation.
    void poll_forms();

    BotActions on_form_completed(const webform::FormSubmission& submission);

    const AppealRecord& record_decision(const ConversationId& conversation, Decision decision,
                                        std::optional<int> mute_days = std::nullopt);

    std::string render_summary_note(const webform::FormSubmission& submission) const;

    const AppealRecord* appeal_for(const ConversationId& conversation) const;
    const AppealRecord* open_appeal_for_user(const UserId& user) const;
    // Conversation ids of all appeals, in creation order.
    const std::vector<ConversationId>& appeal_order() const { return appeal_order_; }

    nlohmann::json snapshot() const;

private:
    BotActions on_first_appeal(const UserId& user, const platform::PlatformEvent& event);
    BotActions on_subsequent_message(AppealRecord& record, const ConversationId& acting_conversation);
    void apply_actions(const ConversationId& conversation, const BotActions& actions);
    std::string fill_template(const std::string& tmpl, const UserId& user) const;

    platform::PlatformOps& platform_;
    webform::FormService& form_;
    experiment::AssignmentStore& assignments_;
    experiment::EventSink& log_;
    EngineConfig config_;

    std::map<ConversationId, AppealRecord> appeals_;
    std::vector<ConversationId> appeal_order_;
    std::map<UserId, ConversationId> open_by_user_;
    std::set<MessageId> processed_;
    std::uint64_t platform_cursor_ = 0;
    std::uint64_t form_cursor_ = 0;
    bool outage_noted_ = false;
};

} // namespace appealgate::core
