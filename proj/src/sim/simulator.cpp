#include "appealgate/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "appealgate/common/errors.hpp"

namespace appealgate::sim {

using core::Decision;
using core::StateKind;

SimEnv SimEnv::make(experiment::EventSink& sink, const core::EngineConfig& engine_config,
                    const webform::FormDefinition& form_definition, double assignment_ratio,
                    std::uint64_t assignment_seed) {
    SimEnv env;
    env.sink = &sink;
    env.platform = std::make_unique<platform::SimulatedPlatform>(sink);
    auto* platform_ptr = env.platform.get();
    env.form = std::make_unique<webform::FormService>(form_definition, sink,
                                                      [platform_ptr] { return platform_ptr->now(); });
    env.assignments = std::make_unique<experiment::AssignmentStore>(assignment_ratio, assignment_seed, sink);
    env.engine = std::make_unique<core::AppealEngine>(*env.platform, *env.form, *env.assignments, sink,
                                                      engine_config);
    return env;
}

namespace {

std::vector<webform::Answer> form_answers(Rng& rng, const SimulatedUser& user,
                                          const webform::FormDefinition& def,
                                          const std::string& ban_reason) {
    std::vector<webform::Answer> answers;
    for (const auto& q : def.questions) {
        webform::Answer a;
        if (q.open_text) {
            if (q.key == "copy_ban_reason") {
                a.text = ban_reason.empty() ? "not sure what the reason was" : ban_reason;
            } else {
                a.text = compose_text(rng, user.pps, 0.0);
            }
        } else {
            // Sincere users tend to pick the keyed options; others guess.
            if (rng.bernoulli(0.75)) {
                a.selected = q.answer_key;
            } else {
                a.selected = {static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(q.options.size()) - 1))};
            }
        }
        answers.push_back(std::move(a));
    }
    return answers;
}

std::string filler_body(std::size_t chars) {
    std::string body;
    body.reserve(chars);
    const std::string word = "reply ";
    while (body.size() + word.size() <= chars) body += word;
    while (body.size() < chars) body.push_back('.');
    return body;
}

} // namespace

SimSummary run_simulation(const std::vector<SimulatedUser>& population, SimEnv& env,
                          const BehaviorConfig& config) {
    SimSummary summary;
    auto& platform = *env.platform;
    auto& engine = *env.engine;
    auto& form = *env.form;

    for (const auto& user : population) {
        Rng rng(splitmix64(user.seed ^ 0xB0B5EEDULL));
        platform.advance_clock(60);

        const std::string ban_reason = "rule violation: prohibited content";
        std::optional<std::string> reason;
        if (!user.missing_reason) reason = ban_reason;
        std::ostringstream ban_body;
        ban_body << "you have been permanently banned from the community";
        if (reason) ban_body << " | reason: " << *reason;

        env.assignments->set_pps_hint(user.id, user.pps);
        const auto conversation = platform.open_ban_conversation(user.id, reason, true, ban_body.str());
        engine.pump();

        // The user appeals some time after the ban.
        platform.advance_clock(600 + rng.uniform_int(0, 6600));
        platform.user_sends(conversation, user.appeal_text);
        engine.pump();

        const auto* record = engine.appeal_for(conversation);
        if (record == nullptr) throw std::runtime_error("simulation: appeal record missing");
        const bool treatment = record->group == core::Group::Treatment;
        (treatment ? summary.treatment_total : summary.control_total)++;
        if (treatment) {
            (user.toxic ? summary.toxic_treatment : summary.nontoxic_treatment)++;
            if (record->bypassed) ++summary.treatment_bypassed;
        }

        // Treatment users either work through the form or drift away.
        if (treatment && record->state.kind == StateKind::TreatmentAwaitingForm) {
            if (user.will_complete) {
                if (rng.bernoulli(0.2)) { // an extra message before completing
                    platform.advance_clock(300 + rng.uniform_int(0, 900));
                    platform.user_sends(conversation, compose_text(rng, user.pps, 0.0));
                    engine.pump();
                }
                const double duration =
                    rng.lognormal(config.median_completion_seconds, config.completion_sigma);
                platform.advance_clock(120 + rng.uniform_int(0, 1200)); // until the link is opened
                const core::Timestamp started = platform.now();
                platform.advance_clock(static_cast<core::Timestamp>(std::max(10.0, duration)));
                form.submit(user.id, form_answers(rng, user, form.definition(), ban_reason), started,
                            platform.now());
                engine.pump(); // poll picks the submission up, handover runs
                if (user.toxic) ++summary.toxic_treatment_completed;
                else ++summary.nontoxic_treatment_completed;
                ++summary.treatment_completed;
            } else {
                const std::uint32_t extra = std::min<std::uint32_t>(rng.geometric(config.abandoned_messages_q), 3);
                for (std::uint32_t i = 0; i < extra; ++i) {
                    platform.advance_clock(600 + rng.uniform_int(0, 3000));
                    platform.user_sends(conversation, compose_text(rng, user.pps, 0.0));
                    engine.pump();
                }
                continue; // abandoned: invisible, never decided
            }
        }

        // Moderators only ever see visible appeals.
        const bool visible = !treatment || record->completed || record->bypassed;
        if (!visible) continue;

        const double respond_p = treatment ? config.respond_treatment : config.respond_control;
        const bool responded = rng.bernoulli(respond_p);
        if (!responded) {
            platform.advance_clock(3600);
            engine.record_decision(conversation, Decision::Ignored);
            engine.pump();
            continue;
        }
        (treatment ? summary.treatment_responded : summary.control_responded)++;

        // Back-and-forth: followups ~ Geom, moderator messages 1 + Geom.
        const std::uint32_t followups = rng.geometric(config.extra_user_messages_q);
        const std::uint32_t mod_messages = 1 + rng.geometric(config.mod_messages_q);
        const double chars_median =
            treatment ? config.mod_chars_median_treatment : config.mod_chars_median_control;
        const double total_chars = std::max(8.0, rng.lognormal(chars_median, config.mod_chars_sigma));
        const std::size_t per_message =
            std::max<std::size_t>(1, static_cast<std::size_t>(total_chars / mod_messages));

        std::uint32_t user_left = followups, mod_left = mod_messages;
        while (user_left > 0 || mod_left > 0) {
            if (mod_left > 0) {
                platform.advance_clock(300 + rng.uniform_int(0, 1800));
                platform.moderator_sends(conversation, filler_body(per_message));
                engine.pump();
                --mod_left;
            }
            if (user_left > 0) {
                platform.advance_clock(300 + rng.uniform_int(0, 1800));
                const bool toxic_followup = rng.bernoulli(config.followup_toxic_prob);
                const double followup_score = toxic_followup ? 1.0 - std::exp(-50 * 0.03125) : 0.0;
                platform.user_sends(conversation, compose_text(rng, user.pps, followup_score));
                engine.pump();
                --user_left;
            }
        }

        platform.advance_clock(1800);
        const double grant_p = std::clamp(config.grant_base + config.grant_pps * user.pps +
                                              (user.will_complete ? config.grant_complete : 0.0),
                                          0.0, 1.0);
        if (rng.bernoulli(grant_p)) {
            engine.record_decision(conversation, Decision::Granted);
            (treatment ? summary.treatment_granted : summary.control_granted)++;
        } else if (user.toxic && rng.bernoulli(config.mute_prob)) {
            const int days = static_cast<int>(rng.uniform_int(1, 28));
            engine.record_decision(conversation, Decision::Muted, days);
        } else {
            engine.record_decision(conversation, Decision::Denied);
        }
        engine.pump();
    }
    return summary;
}

stats::RegressionTable parameter_recovery(const std::vector<experiment::EventRecord>& records) {
    using experiment::EventType;
    std::map<std::string, double> pps;
    std::map<std::string, bool> treatment;
    std::map<std::string, bool> offered; // ban reason present => form offered
    std::map<std::string, bool> completed;

    std::map<std::string, std::string> conv_user;
    for (const auto& r : records) {
        switch (r.type) {
            case EventType::Assignment:
                treatment[r.user] = r.payload.at("group").get<std::string>() == "treatment";
                if (r.payload.contains("pps")) pps[r.user] = r.payload.at("pps").get<double>();
                break;
            case EventType::Message:
                if (r.payload.contains("ban") && r.payload.at("ban").at("permanent").get<bool>()) {
                    conv_user[r.conversation] = r.user;
                    offered[r.user] = r.payload.at("ban").contains("reason");
                }
                break;
            case EventType::FormSubmit:
                completed[r.user] = true;
                break;
            default:
                break;
        }
    }

    std::vector<double> x;
    std::vector<double> y;
    for (const auto& [user, is_treatment] : treatment) {
        if (!is_treatment) continue;
        auto off = offered.find(user);
        if (off == offered.end() || !off->second) continue;
        auto p = pps.find(user);
        if (p == pps.end())
            throw ValidationError("parameter_recovery: no recorded pps for " + user);
        x.push_back(p->second);
        y.push_back(completed.count(user) ? 1.0 : 0.0);
    }
    if (x.empty()) throw ValidationError("parameter_recovery: no treatment users in log");

    Eigen::MatrixXd X(static_cast<Eigen::Index>(x.size()), 1);
    Eigen::VectorXd yy(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        X(static_cast<Eigen::Index>(i), 0) = x[i];
        yy[static_cast<Eigen::Index>(i)] = y[i];
    }
    return stats::logit_inference(X, yy, {"pps"});
}

std::vector<std::string> audit_log(const std::vector<experiment::EventRecord>& records) {
    using experiment::EventType;
    std::vector<std::string> violations;

    std::map<std::string, std::string> group_of;      // user -> group
    std::set<std::string> assigned;
    std::map<std::string, std::string> conv_user;     // ban conversations
    std::map<std::string, std::string> open_conv_of;  // user -> open ban conversation
    std::map<std::string, bool> reason_present;
    std::map<std::string, bool> has_appeal;           // conversation saw its first user message
    std::map<std::string, bool> completed_conv;
    std::map<std::string, bool> decided_conv;
    std::map<std::string, bool> archived;

    // The hidden-while-awaiting invariant is checked at input-event
    // boundaries: a transition and its actions commit atomically, so the
    // state between a message and its bot actions is not observable.
    auto awaiting = [&](const std::string& conv) {
        auto cu = conv_user.find(conv);
        if (cu == conv_user.end()) return false;
        const std::string& user = cu->second;
        auto g = group_of.find(user);
        if (g == group_of.end() || g->second != "treatment") return false;
        if (!reason_present[conv]) return false;
        if (!has_appeal[conv]) return false;
        if (completed_conv[conv]) return false;
        if (decided_conv[conv]) return false;
        return true;
    };
    auto check_hidden = [&](const std::string& conv, std::uint64_t seq) {
        if (awaiting(conv) && !archived[conv])
            violations.push_back("conversation " + conv + " visible while awaiting form (before seq " +
                                 std::to_string(seq) + ")");
    };

    const std::set<EventType> inputs = {EventType::Message, EventType::FormSubmit, EventType::Outage,
                                        EventType::Decision, EventType::Archive, EventType::Unarchive,
                                        EventType::Note};

    for (const auto& r : records) {
        if (inputs.count(r.type) && !r.conversation.empty()) check_hidden(r.conversation, r.seq);

        switch (r.type) {
            case EventType::Assignment: {
                if (assigned.count(r.user))
                    violations.push_back("second assignment event for user " + r.user);
                assigned.insert(r.user);
                group_of[r.user] = r.payload.at("group").get<std::string>();
                break;
            }
            case EventType::Message: {
                if (r.payload.contains("ban")) {
                    if (r.payload.at("ban").at("permanent").get<bool>()) {
                        conv_user[r.conversation] = r.user;
                        if (!open_conv_of.count(r.user)) open_conv_of[r.user] = r.conversation;
                        reason_present[r.conversation] = r.payload.at("ban").contains("reason");
                        archived[r.conversation] = false;
                    }
                } else if (r.payload.at("sender").get<std::string>() == "user" &&
                           conv_user.count(r.conversation)) {
                    has_appeal[r.conversation] = true;
                }
                break;
            }
            case EventType::BotAction: {
                auto cu = conv_user.find(r.conversation);
                if (cu != conv_user.end()) {
                    auto g = group_of.find(cu->second);
                    if (g != group_of.end() && g->second == "control")
                        violations.push_back("bot action on control conversation " + r.conversation +
                                             " (seq " + std::to_string(r.seq) + ")");
                }
                const std::string action = r.payload.at("action").get<std::string>();
                if (action == "archive") archived[r.conversation] = true;
                if (action == "unarchive") archived[r.conversation] = false;
                break;
            }
            case EventType::Archive:
                archived[r.conversation] = true;
                break;
            case EventType::Unarchive:
                archived[r.conversation] = false;
                break;
            case EventType::FormSubmit: {
                auto open = open_conv_of.find(r.user);
                if (open != open_conv_of.end()) completed_conv[open->second] = true;
                break;
            }
            case EventType::Decision:
                decided_conv[r.conversation] = true;
                if (conv_user.count(r.conversation) &&
                    open_conv_of.count(conv_user[r.conversation]) &&
                    open_conv_of[conv_user[r.conversation]] == r.conversation)
                    open_conv_of.erase(conv_user[r.conversation]);
                break;
            default:
                break;
        }
    }
    for (const auto& [conv, user] : conv_user) {
        (void)user;
        if (awaiting(conv) && !archived[conv])
            violations.push_back("conversation " + conv + " visible while awaiting form (final state)");
    }
    return violations;
}

} // namespace appealgate::sim
