#include <doctest.h>

#include "appealgate/common/errors.hpp"
#include "appealgate/experiment/event_log.hpp"
#include "appealgate/webform/form.hpp"

using namespace appealgate;
using webform::Answer;
using webform::FormDefinition;
using webform::FormService;

namespace {

std::vector<Answer> good_answers() {
    return {{"the ban reason", {}},
            {"what i did", {}},
            {"what i will change", {}},
            {"the rule in my words", {}},
            {"", {1, 3}}};
}

} // namespace

TEST_CASE("form definition structure is enforced") {
    CHECK_NOTHROW(FormDefinition::builtin_default().validate());

    auto missing = FormDefinition::builtin_default();
    missing.questions.pop_back();
    CHECK_THROWS_AS(missing.validate(), ValidationError);

    auto bad_key = FormDefinition::builtin_default();
    bad_key.questions[4].answer_key = {1};
    CHECK_THROWS_AS(bad_key.validate(), ValidationError);

    auto bad_options = FormDefinition::builtin_default();
    bad_options.questions[4].options.pop_back();
    CHECK_THROWS_AS(bad_options.validate(), ValidationError);
}

TEST_CASE("access control and single submission") {
    experiment::MemoryEventLog log;
    FormService service(FormDefinition::builtin_default(), log);

    CHECK_THROWS_AS(service.submit("nobody", good_answers(), 0, 100), ValidationError);

    service.grant_access("u1");
    service.grant_access("u1"); // idempotent
    CHECK(service.has_access("u1"));

    const auto& sub = service.submit("u1", good_answers(), 0, 290);
    CHECK(sub.duration() == 290);
    CHECK_THROWS_AS(service.submit("u1", good_answers(), 300, 400), ValidationError);

    // submissions are immutable: re-read returns identical answers
    const auto* read_back = service.submission_for("u1");
    REQUIRE(read_back != nullptr);
    CHECK(read_back->answers[1].text == "what i did");
}

TEST_CASE("answer validation") {
    experiment::MemoryEventLog log;
    FormService service(FormDefinition::builtin_default(), log);
    service.grant_access("u1");

    auto empty_text = good_answers();
    empty_text[3].text = "   \n ";
    CHECK_THROWS_AS(service.submit("u1", empty_text, 0, 1), ValidationError);

    auto no_selection = good_answers();
    no_selection[4].selected = {};
    CHECK_THROWS_AS(service.submit("u1", no_selection, 0, 1), ValidationError);

    auto out_of_range = good_answers();
    out_of_range[4].selected = {7};
    CHECK_THROWS_AS(service.submit("u1", out_of_range, 0, 1), ValidationError);

    auto wrong_count = good_answers();
    wrong_count.pop_back();
    CHECK_THROWS_AS(service.submit("u1", wrong_count, 0, 1), ValidationError);

    auto backwards = good_answers();
    CHECK_THROWS_AS(service.submit("u1", backwards, 100, 50), ValidationError);

    // trimming happens before storage
    auto padded = good_answers();
    padded[1].text = "  kept text\r\n";
    service.submit("u1", padded, 0, 1);
    CHECK(service.submission_for("u1")->answers[1].text == "kept text");
}

TEST_CASE("polling is cursor-isolated and outage-safe") {
    experiment::MemoryEventLog log;
    FormService service(FormDefinition::builtin_default(), log);
    service.grant_access("u1");
    service.grant_access("u2");
    service.grant_access("u3");

    auto [empty, c0] = service.poll_completed(0);
    CHECK(empty.empty());
    CHECK(c0 == 0);

    service.submit("u1", good_answers(), 0, 10);
    auto [one, c1] = service.poll_completed(0);
    REQUIRE(one.size() == 1);
    CHECK(one[0]->user == "u1");

    service.set_outage(true);
    CHECK(service.outage());
    service.submit("u2", good_answers(), 0, 20); // submissions still land during the outage
    CHECK_THROWS_AS(service.poll_completed(c1), OutageError);
    CHECK_THROWS_AS(service.poll_completed(c1), OutageError);

    service.set_outage(false);
    auto [pending, c2] = service.poll_completed(c1);
    REQUIRE(pending.size() == 1); // delivered exactly once, nothing lost
    CHECK(pending[0]->user == "u2");
    auto [nothing, c3] = service.poll_completed(c2);
    CHECK(nothing.empty());
    CHECK(c3 == c2);

    CHECK_THROWS_AS(service.poll_completed(999), ValidationError);
}

TEST_CASE("outage toggles log one event per flip") {
    experiment::MemoryEventLog log;
    FormService service(FormDefinition::builtin_default(), log);
    service.set_outage(true);
    service.set_outage(true); // no duplicate event
    service.set_outage(false);
    long outages = 0;
    for (const auto& r : log.records())
        if (r.type == experiment::EventType::Outage) ++outages;
    CHECK(outages == 2);
}

TEST_CASE("manual toxicity labels are stored only") {
    experiment::MemoryEventLog log;
    FormService service(FormDefinition::builtin_default(), log);
    service.grant_access("u1");
    service.submit("u1", good_answers(), 0, 10);
    CHECK_FALSE(service.submission_for("u1")->manual_toxicity_label.has_value());
    service.set_manual_label("u1", true);
    CHECK(service.submission_for("u1")->manual_toxicity_label == true);
    CHECK_THROWS_AS(service.set_manual_label("ghost", false), NotFoundError);
}
