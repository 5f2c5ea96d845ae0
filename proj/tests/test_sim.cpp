#include <doctest.h>

#include <cmath>

#include "appealgate/experiment/replay.hpp"
#include "appealgate/experiment/report.hpp"
#include "appealgate/sim/behavior.hpp"
#include "appealgate/sim/calibrate.hpp"
#include "appealgate/sim/simulator.hpp"
#include "appealgate/toxicity/scorer.hpp"

using namespace appealgate;

TEST_CASE("beta expectation quadrature matches closed forms") {
    // E[p] = a/(a+b); E[p^2] = a(a+1)/((a+b)(a+b+1))
    for (auto [a, b] : std::vector<std::pair<double, double>>{{0.27, 2.73}, {2.0, 5.0}, {0.5, 0.5}}) {
        const double mean = sim::beta_expectation(a, b, [](double p) { return p; });
        CHECK(mean == doctest::Approx(a / (a + b)).epsilon(1e-10));
        const double second = sim::beta_expectation(a, b, [](double p) { return p * p; });
        CHECK(second == doctest::Approx(a * (a + 1.0) / ((a + b) * (a + b + 1.0))).epsilon(1e-10));
    }
}

TEST_CASE("calibration lands every target and matches the pinned defaults") {
    const sim::CalibrationTargets targets;
    const auto result = sim::calibrate(targets);

    CHECK(result.completion_nontoxic == doctest::Approx(126.0 / 385.0).epsilon(1e-8));
    CHECK(result.completion_toxic == doctest::Approx(5.0 / 57.0).epsilon(1e-8));
    CHECK(result.grant_control == doctest::Approx(90.0 / 880.0).epsilon(1e-8));
    CHECK(result.grant_treatment == doctest::Approx(90.0 / 880.0).epsilon(1e-8));

    const sim::BehaviorConfig pinned;
    CHECK(result.pps_alpha == doctest::Approx(pinned.pps_alpha).epsilon(1e-6));
    CHECK(result.pps_beta == doctest::Approx(pinned.pps_beta).epsilon(1e-6));
    CHECK(result.beta_tox == doctest::Approx(pinned.completion_btox).epsilon(1e-6));
    CHECK(result.grant_base == doctest::Approx(pinned.grant_base).epsilon(1e-5));
    CHECK(result.grant_complete == doctest::Approx(pinned.grant_complete).epsilon(1e-5));
}

TEST_CASE("population generation is deterministic and hits its marginals") {
    sim::BehaviorConfig config;
    config.n_users = 30000;
    config.seed = 11;
    const auto population = sim::generate_population(config);
    const auto population2 = sim::generate_population(config);
    REQUIRE(population.size() == population2.size());
    for (std::size_t i = 0; i < population.size(); i += 997) {
        CHECK(population[i].pps == population2[i].pps);
        CHECK(population[i].appeal_text == population2[i].appeal_text);
        CHECK(population[i].will_complete == population2[i].will_complete);
    }

    long toxic = 0, severe = 0, completers = 0;
    double pps_sum = 0.0;
    for (const auto& user : population) {
        if (user.toxic) ++toxic;
        if (user.toxicity_score >= 0.9) ++severe;
        if (user.will_complete) ++completers;
        pps_sum += user.pps;
    }
    const double n = static_cast<double>(config.n_users);
    CHECK(toxic / n == doctest::Approx(0.13).epsilon(0.06));
    CHECK(severe / n == doctest::Approx(0.073).epsilon(0.09));
    CHECK(completers / n == doctest::Approx(0.2958).epsilon(0.035));
    CHECK(pps_sum / n == doctest::Approx(0.0906).epsilon(0.06));
}

TEST_CASE("generated text reproduces the intended toxicity score exactly") {
    sim::BehaviorConfig config;
    config.n_users = 2000;
    config.seed = 21;
    const auto population = sim::generate_population(config);
    const auto scorer = toxicity::LexiconScorer::builtin_default();
    for (const auto& user : population) {
        const double scored = scorer.score(user.appeal_text).value;
        CHECK(scored == user.toxicity_score); // bit-exact by construction
        CHECK((scored >= 0.7) == user.toxic);
    }
}

TEST_CASE("null completion slope decouples completion from pps") {
    sim::BehaviorConfig config;
    config.n_users = 40000;
    config.seed = 5;
    config.completion_b1 = 0.0;
    const auto population = sim::generate_population(config);
    // split by pps median; completion rates must match
    double lo_n = 0, lo_c = 0, hi_n = 0, hi_c = 0;
    for (const auto& user : population) {
        if (user.pps < 0.0906) {
            ++lo_n;
            lo_c += user.will_complete;
        } else {
            ++hi_n;
            hi_c += user.will_complete;
        }
    }
    CHECK(std::fabs(lo_c / lo_n - hi_c / hi_n) < 0.02);
}

TEST_CASE("small run: audit passes, report builds, determinism holds") {
    sim::BehaviorConfig behavior;
    behavior.n_users = 400;
    behavior.seed = 9;
    behavior.missing_reason_prob = 0.05;

    auto run_once = [&]() {
        auto log = std::make_unique<experiment::MemoryEventLog>();
        core::EngineConfig engine_config;
        auto env = sim::SimEnv::make(*log, engine_config, webform::FormDefinition::builtin_default(),
                                     0.5, 1234);
        const auto population = sim::generate_population(behavior);
        const auto summary = sim::run_simulation(population, env, behavior);
        return std::make_pair(std::move(log), summary);
    };

    auto [log1, summary1] = run_once();
    auto [log2, summary2] = run_once();

    // determinism: identical event streams
    REQUIRE(log1->records().size() == log2->records().size());
    for (std::size_t i = 0; i < log1->records().size(); i += 13)
        CHECK(log1->records()[i].to_json() == log2->records()[i].to_json());

    // invariants hold on the log
    const auto violations = sim::audit_log(log1->records());
    for (const auto& v : violations) MESSAGE(v);
    CHECK(violations.empty());

    // the log is a valid report input
    const auto scorer = toxicity::LexiconScorer::builtin_default();
    const auto report = experiment::build_report(
        log1->records(), [&scorer](const std::string& t) { return scorer.score(t).value; }, {});
    CHECK(report.control.total + report.treatment.total == 400);
    CHECK(report.treatment.completed == summary1.treatment_completed);
    CHECK(report.control.granted == summary1.control_granted);
    CHECK(report.treatment.visible ==
          summary1.treatment_completed + summary1.treatment_bypassed);

    // and replayable end to end
    experiment::ReplayContext context;
    context.assignment_ratio = 0.5;
    context.assignment_seed = 1234;
    context.form = webform::FormDefinition::builtin_default();
    const auto replayed = experiment::replay(log1->records(), context);
    CHECK(replayed.sink->done());
}

TEST_CASE("ratio 0 means no bot actions anywhere") {
    sim::BehaviorConfig behavior;
    behavior.n_users = 120;
    behavior.seed = 2;
    experiment::MemoryEventLog log;
    auto env = sim::SimEnv::make(log, core::EngineConfig{}, webform::FormDefinition::builtin_default(),
                                 0.0, 5);
    const auto population = sim::generate_population(behavior);
    const auto summary = sim::run_simulation(population, env, behavior);
    CHECK(summary.treatment_total == 0);
    for (const auto& r : log.records()) CHECK(r.type != experiment::EventType::BotAction);
}

TEST_CASE("audit detects planted violations") {
    sim::BehaviorConfig behavior;
    behavior.n_users = 50;
    behavior.seed = 4;
    experiment::MemoryEventLog log;
    auto env = sim::SimEnv::make(log, core::EngineConfig{}, webform::FormDefinition::builtin_default(),
                                 0.5, 99);
    const auto population = sim::generate_population(behavior);
    sim::run_simulation(population, env, behavior);
    auto records = log.records();

    // plant a bot action on a control user's conversation
    std::string control_conv;
    std::map<std::string, std::string> group_of;
    for (const auto& r : records)
        if (r.type == experiment::EventType::Assignment)
            group_of[r.user] = r.payload.at("group").get<std::string>();
    for (const auto& r : records) {
        if (r.type == experiment::EventType::Message && r.payload.contains("ban") &&
            group_of.count(r.user) && group_of[r.user] == "control") {
            control_conv = r.conversation;
            break;
        }
    }
    REQUIRE_FALSE(control_conv.empty());
    experiment::EventRecord bad;
    bad.seq = records.back().seq + 1;
    bad.ts = records.back().ts;
    bad.type = experiment::EventType::BotAction;
    bad.conversation = control_conv;
    bad.payload = {{"action", "reply"}, {"body", "oops"}};
    records.push_back(bad);
    CHECK_FALSE(sim::audit_log(records).empty());
}

TEST_CASE("parameter recovery on a simulated log returns a sane slope") {
    sim::BehaviorConfig behavior;
    behavior.n_users = 4000;
    behavior.seed = 17;
    experiment::MemoryEventLog log;
    auto env = sim::SimEnv::make(log, core::EngineConfig{}, webform::FormDefinition::builtin_default(),
                                 1.0, 31); // all treatment
    const auto population = sim::generate_population(behavior);
    sim::run_simulation(population, env, behavior);

    const auto table = sim::parameter_recovery(log.records());
    CHECK(table.n == 4000);
    const auto& slope = table.coefficients[1];
    CHECK(slope.estimate > 2.0);
    CHECK(slope.estimate < 5.0);
    CHECK(std::fabs(slope.estimate - 3.408) < 3.0 * slope.std_error);
    // direct evaluations of the completion curve at its anchors
    CHECK(1.0 / (1.0 + std::exp(1.051)) == doctest::Approx(0.259).epsilon(0.002));
    CHECK(1.0 / (1.0 + std::exp(-(-1.051 + 3.408 * 0.5))) == doctest::Approx(0.658).epsilon(0.001));
}
