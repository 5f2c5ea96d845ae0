#include "appealgate/platform/platform.hpp"

#include <algorithm>

#include "appealgate/common/errors.hpp"

namespace appealgate::platform {

using experiment::EventType;

SimulatedPlatform::SimulatedPlatform(experiment::EventSink& log) : log_(log) {}

Conversation& SimulatedPlatform::conversation_mut(const core::ConversationId& id) {
    auto it = conversations_.find(id);
    if (it == conversations_.end()) throw NotFoundError("unknown conversation: " + id);
    return it->second;
}

const Conversation& SimulatedPlatform::conversation(const core::ConversationId& id) const {
    auto it = conversations_.find(id);
    if (it == conversations_.end()) throw NotFoundError("unknown conversation: " + id);
    return it->second;
}

bool SimulatedPlatform::has_conversation(const core::ConversationId& id) const {
    return conversations_.count(id) > 0;
}

void SimulatedPlatform::set_clock(core::Timestamp t) {
    if (t < clock_) throw ValidationError("clock may not move backwards");
    clock_ = t;
}

std::pair<std::vector<PlatformEvent>, std::uint64_t>
SimulatedPlatform::fetch_new_events(std::uint64_t cursor) {
    if (cursor > queue_.size())
        throw ValidationError("fetch_new_events: invalid cursor " + std::to_string(cursor));
    std::vector<PlatformEvent> out(queue_.begin() + static_cast<std::ptrdiff_t>(cursor), queue_.end());
    return {std::move(out), queue_.size()};
}

core::MessageId SimulatedPlatform::deliver(const core::ConversationId& id, core::Role sender,
                                           const std::string& body, bool enqueue, bool ban_notice) {
    if (body.empty()) throw ValidationError("message body must be non-empty");
    Conversation& conv = conversation_mut(id);
    core::Message m;
    m.id = "m" + std::to_string(next_message_++);
    m.conversation = id;
    m.sender = sender;
    m.body = body;
    m.sent_at = clock_;
    conv.messages.push_back(m);
    if (enqueue) queue_.push_back({queue_.size() + 1, m, ban_notice});
    return m.id;
}

void SimulatedPlatform::log_message(const core::Message& m, bool ban_notice,
                                    const std::optional<std::string>& reason, bool permanent) {
    nlohmann::json payload;
    payload["id"] = m.id;
    payload["sender"] = core::to_string(m.sender);
    payload["body"] = m.body;
    if (ban_notice) {
        nlohmann::json ban;
        ban["permanent"] = permanent;
        if (reason) ban["reason"] = *reason;
        payload["ban"] = ban;
    }
    log_.append(EventType::Message, m.sent_at, m.conversation,
                conversations_.at(m.conversation).participant, std::move(payload));
}

void SimulatedPlatform::surface(const core::ConversationId& id) {
    auto it = std::find(inbox_order_.begin(), inbox_order_.end(), id);
    if (it != inbox_order_.end()) inbox_order_.erase(it);
    inbox_order_.insert(inbox_order_.begin(), id);
}

// ---- engine-facing raw ops --------------------------------------------------

void SimulatedPlatform::send_message(const core::ConversationId& id, const std::string& body) {
    // Bot messages are not enqueued: the engine must not react to itself.
    deliver(id, core::Role::Bot, body, /*enqueue=*/false, /*ban_notice=*/false);
}

void SimulatedPlatform::archive(const core::ConversationId& id) {
    conversation_mut(id).archived = true; // no-op when already archived
}

void SimulatedPlatform::unarchive(const core::ConversationId& id) {
    Conversation& conv = conversation_mut(id);
    conv.archived = false;
    surface(id); // lands at the top of the moderators' inbox
}

void SimulatedPlatform::add_private_note(const core::ConversationId& id, const std::string& body) {
    conversation_mut(id).private_notes.push_back(body);
}

void SimulatedPlatform::mute(const core::UserId& user, int days) {
    if (days < 1 || days > 28) throw ValidationError("mute: days must be in [1, 28]");
    mutes_[user] = clock_ + static_cast<core::Timestamp>(days) * 86400;
}

void SimulatedPlatform::ensure_conversation(const core::ConversationId& id, const core::UserId& participant) {
    if (conversations_.count(id)) return;
    Conversation conv;
    conv.id = id;
    conv.participant = participant;
    conversations_.emplace(id, std::move(conv));
    inbox_order_.insert(inbox_order_.begin(), id);
}

// ---- driver-facing logged inputs ---------------------------------------------

core::ConversationId SimulatedPlatform::open_ban_conversation(const core::UserId& user,
                                                              const std::optional<std::string>& reason,
                                                              bool permanent, const std::string& body) {
    Conversation conv;
    conv.id = "cv" + std::to_string(next_conversation_++);
    conv.participant = user;
    const core::ConversationId id = conv.id;
    conversations_.emplace(id, std::move(conv));
    inbox_order_.insert(inbox_order_.begin(), id);

    core::BanRecord ban;
    ban.user = user;
    ban.reason = reason;
    ban.permanent = permanent;
    ban.banned_at = clock_;
    bans_[id] = ban;

    const core::MessageId mid = deliver(id, core::Role::Moderator, body, /*enqueue=*/true, /*ban_notice=*/true);
    log_message(conversations_.at(id).messages.back(), true, reason, permanent);
    (void)mid;
    return id;
}

core::ConversationId SimulatedPlatform::open_user_conversation(const core::UserId& user,
                                                               const std::string& body) {
    Conversation conv;
    conv.id = "cv" + std::to_string(next_conversation_++);
    conv.participant = user;
    const core::ConversationId id = conv.id;
    conversations_.emplace(id, std::move(conv));
    inbox_order_.insert(inbox_order_.begin(), id);
    deliver(id, core::Role::BannedUser, body, /*enqueue=*/true, /*ban_notice=*/false);
    log_message(conversations_.at(id).messages.back(), false, std::nullopt, false);
    return id;
}

std::optional<core::MessageId> SimulatedPlatform::user_sends(const core::ConversationId& id,
                                                             const std::string& body) {
    const Conversation& conv = conversation(id);
    auto muted = mutes_.find(conv.participant);
    if (muted != mutes_.end() && clock_ < muted->second) {
        ++suppressed_; // rejected by the platform, nothing delivered or logged
        return std::nullopt;
    }
    const core::MessageId mid = deliver(id, core::Role::BannedUser, body, /*enqueue=*/true, false);
    log_message(conversations_.at(id).messages.back(), false, std::nullopt, false);
    return mid;
}

core::MessageId SimulatedPlatform::moderator_sends(const core::ConversationId& id, const std::string& body) {
    const core::MessageId mid = deliver(id, core::Role::Moderator, body, /*enqueue=*/true, false);
    log_message(conversations_.at(id).messages.back(), false, std::nullopt, false);
    return mid;
}

void SimulatedPlatform::moderator_note(const core::ConversationId& id, const std::string& body) {
    conversation_mut(id).private_notes.push_back(body);
    nlohmann::json payload;
    payload["body"] = body;
    log_.append(EventType::Note, clock_, id, conversation(id).participant, std::move(payload));
}

void SimulatedPlatform::moderator_set_archived(const core::ConversationId& id, bool archived) {
    if (archived) {
        conversation_mut(id).archived = true;
        log_.append(EventType::Archive, clock_, id, conversation(id).participant, nlohmann::json::object());
    } else {
        unarchive(id);
        log_.append(EventType::Unarchive, clock_, id, conversation(id).participant, nlohmann::json::object());
    }
}

// ---- lookups -----------------------------------------------------------------

const core::BanRecord* SimulatedPlatform::ban_for(const core::ConversationId& id) const {
    auto it = bans_.find(id);
    return it == bans_.end() ? nullptr : &it->second;
}

std::vector<core::ConversationId> SimulatedPlatform::visible_inbox() const {
    std::vector<core::ConversationId> out;
    for (const auto& id : inbox_order_)
        if (!conversations_.at(id).archived) out.push_back(id);
    return out;
}

std::optional<core::Timestamp> SimulatedPlatform::muted_until(const core::UserId& user) const {
    auto it = mutes_.find(user);
    if (it == mutes_.end()) return std::nullopt;
    return it->second;
}

nlohmann::json SimulatedPlatform::snapshot() const {
    nlohmann::json j;
    j["clock"] = clock_;
    j["suppressed"] = suppressed_;
    j["inbox"] = inbox_order_;
    nlohmann::json convs = nlohmann::json::array();
    for (const auto& [id, conv] : conversations_) {
        nlohmann::json c;
        c["id"] = id;
        c["participant"] = conv.participant;
        c["archived"] = conv.archived;
        c["notes"] = conv.private_notes;
        nlohmann::json msgs = nlohmann::json::array();
        for (const auto& m : conv.messages) {
            msgs.push_back({{"id", m.id},
                            {"sender", core::to_string(m.sender)},
                            {"body", m.body},
                            {"ts", m.sent_at}});
        }
        c["messages"] = std::move(msgs);
        convs.push_back(std::move(c));
    }
    j["conversations"] = std::move(convs);
    nlohmann::json mutes = nlohmann::json::object();
    for (const auto& [user, until] : mutes_) mutes[user] = until;
    j["mutes"] = std::move(mutes);
    return j;
}

} // namespace appealgate::platform
