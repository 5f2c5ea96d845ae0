#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace appealgate::core {

using UserId = std::string;
using ConversationId = std::string;
using MessageId = std::string;
using Timestamp = std::uint64_t; // logical seconds

enum class Role { BannedUser, Moderator, Bot };

struct BanRecord {
    UserId user;
    std::optional<std::string> reason; // absent reason routes the appeal around the form
    bool permanent = false;
    Timestamp banned_at = 0;
};

struct Message {
    MessageId id;
    ConversationId conversation;
    Role sender = Role::BannedUser;
    std::string body;
    bool private_note = false; // only bot/moderator messages may be notes
    Timestamp sent_at = 0;
};

enum class Group { Control, Treatment };

enum class Decision { Granted, Denied, Ignored, Muted };

enum class StateKind {
    ControlOpen,
    Bypassed, // treatment, ban reason missing: skips the form entirely
    TreatmentAwaitingForm,
    TreatmentCompleted,
    Decided,
};

struct AppealState {
    StateKind kind = StateKind::ControlOpen;
    std::optional<Decision> decision; // set iff kind == Decided

    bool terminal() const { return kind == StateKind::Decided; }
};

struct AppealRecord {
    UserId user;
    ConversationId conversation;
    Group group = Group::Control;
    AppealState state;
    MessageId first_message_id;
    std::optional<double> pps; // probability in [0, 1] when scored
    Timestamp created_at = 0;
    std::optional<Timestamp> completed_at;
    std::optional<Timestamp> decided_at;
    // Path flags survive the transition into Decided; reporting needs them.
    bool bypassed = false;
    bool completed = false;
};

enum class BotActionKind { Reply, Archive, Unarchive, PostPrivateNote, None };

struct BotAction {
    BotActionKind kind = BotActionKind::None;
    std::string body; // for Reply / PostPrivateNote

    static BotAction reply(std::string text) { return {BotActionKind::Reply, std::move(text)}; }
    static BotAction archive() { return {BotActionKind::Archive, {}}; }
    static BotAction unarchive() { return {BotActionKind::Unarchive, {}}; }
    static BotAction note(std::string text) { return {BotActionKind::PostPrivateNote, std::move(text)}; }
};

using BotActions = std::vector<BotAction>;

const char* to_string(Group group);
const char* to_string(Decision decision);
const char* to_string(StateKind kind);
const char* to_string(Role role);
const char* to_string(BotActionKind kind);

} // namespace appealgate::core
