#include <doctest.h>

#include "appealgate/common/errors.hpp"
#include "appealgate/experiment/event_log.hpp"
#include "appealgate/platform/platform.hpp"

using namespace appealgate;
using platform::SimulatedPlatform;

TEST_CASE("event fetch is cursor-monotone with exactly-once delivery") {
    experiment::MemoryEventLog log;
    SimulatedPlatform p(log);

    auto [none, zero] = p.fetch_new_events(0);
    CHECK(none.empty());
    CHECK(zero == 0);

    p.advance_clock(5);
    const auto conv = p.open_ban_conversation("u1", std::string("reason"), true, "banned");
    p.user_sends(conv, "one");
    p.user_sends(conv, "two");

    auto [events, next] = p.fetch_new_events(0);
    CHECK(events.size() == 3); // ban notice + two user messages
    auto [again, next2] = p.fetch_new_events(next);
    CHECK(again.empty());
    CHECK(next2 == next);

    p.user_sends(conv, "three");
    auto [fresh, next3] = p.fetch_new_events(next);
    REQUIRE(fresh.size() == 1);
    CHECK(fresh[0].message.body == "three");
    CHECK(next3 == next + 1);

    CHECK_THROWS_AS(p.fetch_new_events(next3 + 10), ValidationError);
}

TEST_CASE("archive toggles are idempotent and unarchive surfaces the thread") {
    experiment::MemoryEventLog log;
    SimulatedPlatform p(log);
    p.advance_clock(1);
    const auto a = p.open_ban_conversation("u1", std::string("r"), true, "banned");
    const auto b = p.open_ban_conversation("u2", std::string("r"), true, "banned");
    CHECK(p.visible_inbox() == std::vector<core::ConversationId>{b, a});

    p.archive(a);
    CHECK(p.visible_inbox() == std::vector<core::ConversationId>{b});
    p.archive(a); // no-op
    CHECK(p.conversation(a).archived);

    p.unarchive(a);
    CHECK_FALSE(p.conversation(a).archived);
    // moved to the head of the visible ordering
    CHECK(p.visible_inbox() == std::vector<core::ConversationId>{a, b});

    CHECK_THROWS_AS(p.archive("cv404"), NotFoundError);
}

TEST_CASE("messages are append-only and ordered") {
    experiment::MemoryEventLog log;
    SimulatedPlatform p(log);
    p.advance_clock(1);
    const auto conv = p.open_ban_conversation("u1", std::string("r"), true, "banned");
    p.advance_clock(1);
    p.user_sends(conv, "a");
    p.advance_clock(1);
    p.moderator_sends(conv, "b");
    const auto& messages = p.conversation(conv).messages;
    REQUIRE(messages.size() == 3);
    for (std::size_t i = 1; i < messages.size(); ++i)
        CHECK(messages[i - 1].sent_at <= messages[i].sent_at);
    CHECK_THROWS_AS(p.user_sends(conv, ""), ValidationError);
}

TEST_CASE("mute window suppresses and then releases user messages") {
    experiment::MemoryEventLog log;
    SimulatedPlatform p(log);
    p.advance_clock(1);
    const auto conv = p.open_ban_conversation("u1", std::string("r"), true, "banned");

    CHECK_THROWS_AS(p.mute("u1", 0), ValidationError);
    CHECK_THROWS_AS(p.mute("u1", 29), ValidationError);
    p.mute("u1", 7);

    p.advance_clock(3 * 86400); // day 3
    CHECK_FALSE(p.user_sends(conv, "let me talk").has_value());
    CHECK(p.suppressed_count() == 1);
    CHECK(p.conversation(conv).messages.size() == 1); // nothing delivered

    p.advance_clock(5 * 86400); // day 8
    CHECK(p.user_sends(conv, "back again").has_value());
    CHECK(p.conversation(conv).messages.size() == 2);
    CHECK(p.suppressed_count() == 1);
}

TEST_CASE("clock never moves backwards") {
    experiment::MemoryEventLog log;
    SimulatedPlatform p(log);
    p.set_clock(100);
    CHECK(p.now() == 100);
    CHECK_THROWS_AS(p.set_clock(99), ValidationError);
    p.set_clock(100); // same instant is fine
}

TEST_CASE("snapshot captures conversations, notes, mutes, and ordering") {
    experiment::MemoryEventLog log;
    SimulatedPlatform p(log);
    p.advance_clock(1);
    const auto conv = p.open_ban_conversation("u1", std::string("r"), true, "banned");
    p.user_sends(conv, "appeal");
    p.add_private_note(conv, "note body");
    p.mute("u1", 3);
    const auto snap = p.snapshot();
    CHECK(snap["conversations"].size() == 1);
    CHECK(snap["conversations"][0]["messages"].size() == 2);
    CHECK(snap["conversations"][0]["notes"].size() == 1);
    CHECK(snap["mutes"].contains("u1"));
    CHECK(snap == p.snapshot()); // deterministic
}
