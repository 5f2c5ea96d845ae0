#include "appealgate/experiment/replay.hpp"

#include "appealgate/common/errors.hpp"

namespace appealgate::experiment {

void ValidatingSink::append(EventType type, core::Timestamp ts, std::string conversation,
                            std::string user, nlohmann::json payload) {
    if (cursor_ >= expected_.size())
        throw CorruptLogError("replay produced an event beyond the end of the log (type " +
                              std::string(to_string(type)) + ")");
    EventRecord actual;
    actual.seq = expected_[cursor_].seq;
    actual.ts = ts;
    actual.type = type;
    actual.conversation = std::move(conversation);
    actual.user = std::move(user);
    actual.payload = std::move(payload);
    const EventRecord& want = expected_[cursor_];
    if (!want.same_content(actual))
        throw CorruptLogError("replay diverged at seq " + std::to_string(want.seq) + ": log has " +
                              want.to_json().dump() + " but replay produced " + actual.to_json().dump());
    ++cursor_;
}

const EventRecord& ValidatingSink::peek() const {
    if (cursor_ >= expected_.size()) throw CorruptLogError("peek past end of log");
    return expected_[cursor_];
}

nlohmann::json ReplayedState::snapshot() const {
    nlohmann::json j;
    j["platform"] = platform->snapshot();
    j["engine"] = engine->snapshot();
    return j;
}

namespace {

webform::Answer answer_from_json(const nlohmann::json& j) {
    webform::Answer a;
    if (j.contains("text")) a.text = j.at("text").get<std::string>();
    if (j.contains("selected")) a.selected = j.at("selected").get<std::vector<int>>();
    return a;
}

core::Decision decision_from_string(const std::string& s) {
    if (s == "granted") return core::Decision::Granted;
    if (s == "denied") return core::Decision::Denied;
    if (s == "ignored") return core::Decision::Ignored;
    if (s == "muted") return core::Decision::Muted;
    throw CorruptLogError("unknown decision: " + s);
}

} // namespace

ReplayedState replay(const std::vector<EventRecord>& records, const ReplayContext& context) {
    ReplayedState state;
    state.sink = std::make_unique<ValidatingSink>(records);
    state.platform = std::make_unique<platform::SimulatedPlatform>(*state.sink);
    auto* platform_ptr = state.platform.get();
    state.form = std::make_unique<webform::FormService>(
        context.form, *state.sink, [platform_ptr] { return platform_ptr->now(); });
    state.assignments =
        std::make_unique<AssignmentStore>(context.assignment_ratio, context.assignment_seed, *state.sink);
    state.engine = std::make_unique<core::AppealEngine>(*state.platform, *state.form, *state.assignments,
                                                        *state.sink, context.engine);

    // True-pps hints ride in assignment payloads; preload them so the
    // regenerated assignment events carry identical payloads.
    for (const auto& r : records)
        if (r.type == EventType::Assignment && r.payload.contains("pps"))
            state.assignments->set_pps_hint(r.user, r.payload.at("pps").get<double>());

    while (!state.sink->done()) {
        const EventRecord r = state.sink->peek();
        const std::size_t before = state.sink->cursor();
        state.platform->set_clock(r.ts);

        switch (r.type) {
            case EventType::Message: {
                const std::string sender = r.payload.at("sender").get<std::string>();
                const std::string body = r.payload.at("body").get<std::string>();
                if (sender == "user") {
                    if (!state.platform->has_conversation(r.conversation))
                        state.platform->open_user_conversation(r.user, body);
                    else
                        state.platform->user_sends(r.conversation, body);
                } else if (sender == "moderator") {
                    if (r.payload.contains("ban")) {
                        const auto& ban = r.payload.at("ban");
                        std::optional<std::string> reason;
                        if (ban.contains("reason")) reason = ban.at("reason").get<std::string>();
                        state.platform->open_ban_conversation(r.user, reason,
                                                              ban.at("permanent").get<bool>(), body);
                    } else {
                        state.platform->moderator_sends(r.conversation, body);
                    }
                } else {
                    throw CorruptLogError("unexpected message sender in log: " + sender);
                }
                break;
            }
            case EventType::Archive:
                state.platform->moderator_set_archived(r.conversation, true);
                break;
            case EventType::Unarchive:
                state.platform->moderator_set_archived(r.conversation, false);
                break;
            case EventType::Note:
                state.platform->moderator_note(r.conversation, r.payload.at("body").get<std::string>());
                break;
            case EventType::FormSubmit: {
                std::vector<webform::Answer> answers;
                for (const auto& ja : r.payload.at("answers")) answers.push_back(answer_from_json(ja));
                state.form->submit(r.user, std::move(answers),
                                   r.payload.at("started_at").get<core::Timestamp>(),
                                   r.payload.at("submitted_at").get<core::Timestamp>());
                break;
            }
            case EventType::Outage:
                state.form->set_outage(r.payload.at("down").get<bool>());
                break;
            case EventType::Decision: {
                std::optional<int> mute_days;
                if (r.payload.contains("mute_days")) mute_days = r.payload.at("mute_days").get<int>();
                state.engine->record_decision(r.conversation,
                                              decision_from_string(r.payload.at("decision").get<std::string>()),
                                              mute_days);
                break;
            }
            case EventType::BotAction:
            case EventType::FormGrant:
            case EventType::Assignment:
                throw CorruptLogError("corrupt log: engine output event at seq " + std::to_string(r.seq) +
                                      " without a triggering input");
        }

        state.engine->pump();

        if (state.sink->cursor() == before)
            throw CorruptLogError("replay made no progress at seq " + std::to_string(r.seq) +
                                  " (event re-application produced nothing)");
    }
    return state;
}

} // namespace appealgate::experiment
