#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "appealgate/core/types.hpp"
#include "appealgate/experiment/event_log.hpp"

namespace appealgate::platform {

struct Conversation {
    core::ConversationId id;
    core::UserId participant;
    std::vector<core::Message> messages; // append-only, ordered by (sent_at, id)
    std::vector<std::string> private_notes;
    bool archived = false;
};

// A delivered platform event the engine consumes.
struct PlatformEvent {
    std::uint64_t id = 0; // queue position, monotone
    core::Message message;
    bool ban_notice = false; // true for the moderators' ban notification
};

// What a live integration must provide: read the message stream, reply,
// (un)archive, add private notes, and mute. A real client needs moderator
// privileges for all of these.
class PlatformOps {
public:
    virtual ~PlatformOps() = default;

    virtual std::pair<std::vector<PlatformEvent>, std::uint64_t> fetch_new_events(std::uint64_t cursor) = 0;
    virtual void send_message(const core::ConversationId& conversation, const std::string& body) = 0;
    virtual void archive(const core::ConversationId& conversation) = 0;
    virtual void unarchive(const core::ConversationId& conversation) = 0;
    virtual void add_private_note(const core::ConversationId& conversation, const std::string& body) = 0;
    virtual void mute(const core::UserId& user, int days) = 0;
    // Operations thread for service notices; a no-op when it already exists.
    virtual void ensure_conversation(const core::ConversationId& id, const core::UserId& participant) = 0;

    virtual core::Timestamp now() const = 0;
    virtual const Conversation& conversation(const core::ConversationId& id) const = 0;
    virtual bool has_conversation(const core::ConversationId& id) const = 0;
    // Ban behind this conversation, nullptr when it is not a ban thread.
    virtual const core::BanRecord* ban_for(const core::ConversationId& conversation) const = 0;
};

// In-memory modmail with a logical clock. The engine-facing ops above do not
// write to the event log (the engine records them as bot actions); the
// driver-facing entry points below log the world inputs they originate.
class SimulatedPlatform : public PlatformOps {
public:
    explicit SimulatedPlatform(experiment::EventSink& log);

    // -- engine-facing (raw, unlogged) ------------------------------------
    std::pair<std::vector<PlatformEvent>, std::uint64_t> fetch_new_events(std::uint64_t cursor) override;
    void send_message(const core::ConversationId& conversation, const std::string& body) override;
    void archive(const core::ConversationId& conversation) override;
    void unarchive(const core::ConversationId& conversation) override;
    void add_private_note(const core::ConversationId& conversation, const std::string& body) override;
    void mute(const core::UserId& user, int days) override;
    void ensure_conversation(const core::ConversationId& id, const core::UserId& participant) override;

    core::Timestamp now() const override { return clock_; }
    const Conversation& conversation(const core::ConversationId& id) const override;
    bool has_conversation(const core::ConversationId& id) const override;

    // -- driver-facing (logged world inputs) -------------------------------
    void advance_clock(core::Timestamp seconds) { clock_ += seconds; }
    void set_clock(core::Timestamp t);

    // Moderators ban a user: opens the modmail thread with the ban notice.
    core::ConversationId open_ban_conversation(const core::UserId& user,
                                               const std::optional<std::string>& reason, bool permanent,
                                               const std::string& body);
    // A conversation not tied to any ban (ordinary member modmail).
    core::ConversationId open_user_conversation(const core::UserId& user, const std::string& body);

    // Returns the message id, or nullopt when the user is muted (suppressed).
    std::optional<core::MessageId> user_sends(const core::ConversationId& conversation,
                                              const std::string& body);
    core::MessageId moderator_sends(const core::ConversationId& conversation, const std::string& body);
    void moderator_note(const core::ConversationId& conversation, const std::string& body);
    void moderator_set_archived(const core::ConversationId& conversation, bool archived);

    // -- lookups ------------------------------------------------------------
    const core::BanRecord* ban_for(const core::ConversationId& conversation) const override;
    // Non-archived conversations, most recently surfaced first.
    std::vector<core::ConversationId> visible_inbox() const;
    std::uint64_t suppressed_count() const { return suppressed_; }
    std::optional<core::Timestamp> muted_until(const core::UserId& user) const;

    // Deterministic state digest for round-trip comparisons.
    nlohmann::json snapshot() const;

private:
    Conversation& conversation_mut(const core::ConversationId& id);
    core::MessageId deliver(const core::ConversationId& conversation, core::Role sender,
                            const std::string& body, bool enqueue, bool ban_notice);
    void log_message(const core::Message& message, bool ban_notice,
                     const std::optional<std::string>& reason, bool permanent);
    void surface(const core::ConversationId& id);

    experiment::EventSink& log_;
    core::Timestamp clock_ = 0;
    std::uint64_t next_conversation_ = 1;
    std::uint64_t next_message_ = 1;
    std::map<core::ConversationId, Conversation> conversations_;
    std::map<core::ConversationId, core::BanRecord> bans_;
    std::map<core::UserId, core::Timestamp> mutes_;
    std::vector<core::ConversationId> inbox_order_; // most recently surfaced first
    std::vector<PlatformEvent> queue_;
    std::uint64_t suppressed_ = 0;
};

} // namespace appealgate::platform
