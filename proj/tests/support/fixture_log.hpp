#pragma once

// Hand-built event log encoding the reference count structure: 438/442
// split, 131 completions, 263/105 responses, 48/42 grants, the full
// toxicity-band layout, and exact engagement medians (5 messages, 2
// moderator messages, 210/208 moderator characters). Everything is driven
// through the live engine so the log is well-formed and replayable.

#include <cmath>
#include <string>
#include <vector>

#include "appealgate/experiment/assignment.hpp"
#include "appealgate/experiment/event_log.hpp"
#include "appealgate/experiment/replay.hpp"
#include "appealgate/sim/simulator.hpp"

namespace fixture {

using namespace appealgate;

inline constexpr std::uint64_t kAssignmentSeed = 424242;

struct FixtureLog {
    std::vector<experiment::EventRecord> records;
    experiment::ReplayContext context;
};

// Toxicity bands as exact ladder sums: 1 - exp(-k/32).
inline double band_score(int cls) {
    switch (cls) {
        case 3: return 1.0 - std::exp(-96 * 0.03125); // 0.9502 severe
        case 2: return 1.0 - std::exp(-48 * 0.03125); // 0.7769 high
        case 1: return 1.0 - std::exp(-28 * 0.03125); // 0.5831 mild
        default: return 0.0;
    }
}

// Mine a user name whose keyed hash lands in the wanted group.
inline std::string mine_user(const std::string& prefix, int index, bool treatment) {
    for (int salt = 0;; ++salt) {
        std::string name = prefix + std::to_string(index);
        if (salt > 0) name += "x" + std::to_string(salt);
        const bool is_treatment =
            experiment::AssignmentStore::uniform_for(kAssignmentSeed, name) < 0.5;
        if (is_treatment == treatment) return name;
    }
}

struct ConvShape {
    int followups = 0;     // user messages after the appeal
    int mod_messages = 0;  // moderator replies
    long mod_chars = 0;    // total characters across the replies
};

inline FixtureLog build_reference_log() {
    FixtureLog out;
    out.context.assignment_ratio = 0.5;
    out.context.assignment_seed = kAssignmentSeed;
    out.context.form = webform::FormDefinition::builtin_default();

    experiment::MemoryEventLog log;
    auto env = sim::SimEnv::make(log, out.context.engine, out.context.form,
                                 out.context.assignment_ratio, out.context.assignment_seed);
    auto& platform = *env.platform;
    auto& engine = *env.engine;
    auto& form = *env.form;

    Rng rng(0xF1C7);

    // Message shapes: >half the responded conversations sit exactly on the
    // medians (total 5 = 1 appeal + 2 followups + 2 moderator messages).
    auto shapes_for = [](int responded, int on_median, int below, int above,
                         long chars_median) {
        std::vector<ConvShape> shapes;
        for (int i = 0; i < on_median; ++i) shapes.push_back({2, 2, 0});
        for (int i = 0; i < below; ++i) shapes.push_back({1, 1, 0});
        for (int i = 0; i < above; ++i) shapes.push_back({4, 4, 0});
        // Char layout independent of message shape; majority at the median.
        const int n = responded;
        const int at = n - 2 * (n / 8);
        for (int i = 0; i < n; ++i) {
            if (i < at)
                shapes[static_cast<std::size_t>(i)].mod_chars = chars_median;
            else if ((i - at) % 2 == 0)
                shapes[static_cast<std::size_t>(i)].mod_chars = 150;
            else
                shapes[static_cast<std::size_t>(i)].mod_chars = 270;
        }
        return shapes;
    };

    auto appeal_text = [&rng](int cls, double mix) {
        return sim::compose_text(rng, mix, band_score(cls));
    };
    auto toxic_followup_text = [&rng](double mix) {
        return sim::compose_text(rng, mix, band_score(2));
    };

    auto drive_conversation = [&](const std::string& user, int tox_class, bool treatment,
                                  bool completes, double pps, const ConvShape* shape,
                                  bool grant, int toxic_followups, int decision_kind) {
        platform.advance_clock(60);
        if (treatment) env.assignments->set_pps_hint(user, pps);
        const auto conv = platform.open_ban_conversation(
            user, std::string("rule violation: prohibited content"), true,
            "you have been permanently banned | reason: rule violation: prohibited content");
        engine.pump();

        platform.advance_clock(120);
        platform.user_sends(conv, appeal_text(tox_class, pps));
        engine.pump();

        if (treatment && completes) {
            platform.advance_clock(180);
            const auto started = platform.now();
            platform.advance_clock(290);
            std::vector<webform::Answer> answers = {
                {"rule violation: prohibited content", {}},
                {sim::compose_text(rng, pps, 0.0), {}},
                {sim::compose_text(rng, pps, 0.0), {}},
                {sim::compose_text(rng, pps, 0.0), {}},
                {"", {1, 3}},
            };
            form.submit(user, std::move(answers), started, platform.now());
            engine.pump();
        } else if (treatment && !completes && shape == nullptr && toxic_followups < 0) {
            // A slice of abandoners keep messaging and get reminded.
            platform.advance_clock(600);
            platform.user_sends(conv, sim::compose_text(rng, pps, 0.0));
            engine.pump();
        }

        if (shape != nullptr) {
            // Moderator responds; alternate replies and followups.
            int fu = shape->followups, mm = shape->mod_messages;
            long chars_left = shape->mod_chars;
            int toxic_left = toxic_followups;
            while (mm > 0 || fu > 0) {
                if (mm > 0) {
                    const long len = chars_left / mm;
                    std::string body(static_cast<std::size_t>(len), 'x');
                    chars_left -= len;
                    --mm;
                    platform.advance_clock(240);
                    platform.moderator_sends(conv, body);
                    engine.pump();
                }
                if (fu > 0) {
                    platform.advance_clock(240);
                    if (toxic_left > 0) {
                        platform.user_sends(conv, toxic_followup_text(pps));
                        --toxic_left;
                    } else {
                        platform.user_sends(conv, sim::compose_text(rng, pps, 0.0));
                    }
                    engine.pump();
                    --fu;
                }
            }
            platform.advance_clock(300);
            if (grant) {
                engine.record_decision(conv, core::Decision::Granted);
            } else if (decision_kind == 1) {
                engine.record_decision(conv, core::Decision::Muted, 7);
            } else {
                engine.record_decision(conv, core::Decision::Denied);
            }
            engine.pump();
        }
    };

    // ----- control arm: 438 appeals, toxicity 32/26/21 severe/high/mild,
    // 263 responded, 48 granted, 12 toxic followups -----
    {
        const auto shapes = shapes_for(263, 150, 56, 57, 210);
        int toxic_followups_left = 12;
        for (int i = 0; i < 438; ++i) {
            int cls = 0;
            if (i < 32) cls = 3;
            else if (i < 58) cls = 2;
            else if (i < 79) cls = 1;
            const bool responded = i < 263;
            const bool grant = i < 48;
            const int tox_fu = (responded && toxic_followups_left > 0) ? 1 : 0;
            toxic_followups_left -= tox_fu;
            const int decision_kind = (!grant && responded && i >= 260) ? 1 : 0; // a few mutes
            drive_conversation(mine_user("c", i, false), cls, false, false, 0.0,
                               responded ? &shapes[static_cast<std::size_t>(i)] : nullptr, grant,
                               tox_fu, decision_kind);
        }
    }

    // ----- treatment arm: 442 appeals; completers first (131), then
    // abandoners (311). Toxic completers: 2 severe, 3 high, 3 mild. Toxic
    // abandoners: 27 severe, 25 high, 21 mild. 105 responded, 42 granted,
    // 10 toxic followups. -----
    {
        const auto shapes = shapes_for(105, 60, 22, 23, 208);
        int toxic_followups_left = 10;
        for (int i = 0; i < 131; ++i) {
            int cls = 0;
            if (i < 2) cls = 3;
            else if (i < 5) cls = 2;
            else if (i < 8) cls = 1;
            const bool responded = i < 105;
            const bool grant = i < 42;
            const double pps = 0.25 + 0.5 * (static_cast<double>(i) / 130.0);
            const int tox_fu = (responded && toxic_followups_left > 0) ? 1 : 0;
            toxic_followups_left -= tox_fu;
            const int decision_kind = (!grant && responded && i >= 103) ? 1 : 0;
            drive_conversation(mine_user("t", i, true), cls, true, true, pps,
                               responded ? &shapes[static_cast<std::size_t>(i)] : nullptr, grant,
                               tox_fu, decision_kind);
        }
        for (int i = 0; i < 311; ++i) {
            int cls = 0;
            if (i < 27) cls = 3;
            else if (i < 52) cls = 2;
            else if (i < 73) cls = 1;
            const double pps = 0.05 + 0.3 * (static_cast<double>(i) / 310.0);
            // toxic_followups = -1 marks the "keeps messaging" slice
            drive_conversation(mine_user("a", i, true), cls, true, false, pps, nullptr, false,
                               (i % 10 == 0) ? -1 : 0, 0);
        }
    }

    out.records = log.records();
    return out;
}

} // namespace fixture
