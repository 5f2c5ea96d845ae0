#pragma once

#include <memory>
#include <string>
#include <vector>

#include "appealgate/core/engine.hpp"
#include "appealgate/experiment/assignment.hpp"
#include "appealgate/experiment/event_log.hpp"
#include "appealgate/platform/platform.hpp"
#include "appealgate/sim/behavior.hpp"
#include "appealgate/stats/logit.hpp"
#include "appealgate/webform/form.hpp"

namespace appealgate::sim {

// One engine stack wired to a shared event sink.
struct SimEnv {
    experiment::EventSink* sink = nullptr;
    std::unique_ptr<platform::SimulatedPlatform> platform;
    std::unique_ptr<webform::FormService> form;
    std::unique_ptr<experiment::AssignmentStore> assignments;
    std::unique_ptr<core::AppealEngine> engine;

    static SimEnv make(experiment::EventSink& sink, const core::EngineConfig& engine_config,
                       const webform::FormDefinition& form_definition, double assignment_ratio,
                       std::uint64_t assignment_seed);
};

struct SimSummary {
    long control_total = 0;
    long treatment_total = 0;
    long treatment_completed = 0;
    long treatment_bypassed = 0;
    long control_granted = 0;
    long treatment_granted = 0;
    long control_responded = 0;
    long treatment_responded = 0;
    long toxic_treatment = 0;
    long toxic_treatment_completed = 0;
    long nontoxic_treatment = 0;
    long nontoxic_treatment_completed = 0;

    double treatment_completion_rate() const {
        return treatment_total > 0 ? double(treatment_completed) / double(treatment_total) : 0.0;
    }
    double grant_rate_overall() const {
        const long total = control_total + treatment_total;
        return total > 0 ? double(control_granted + treatment_granted) / double(total) : 0.0;
    }
};

// Drives every user's episode through the real engine and platform; the
// resulting log is a valid build_report input. Appends to env.sink.
SimSummary run_simulation(const std::vector<SimulatedUser>& population, SimEnv& env,
                          const BehaviorConfig& config);

// Fits completion ~ pps over form-offered treatment users using the true pps
// values recorded in assignment events.
stats::RegressionTable parameter_recovery(const std::vector<experiment::EventRecord>& records);

// Independent passive fold over the log checking the engine's end-to-end
// invariants: control silence, hidden-while-awaiting, single assignment per
// user. Returns human-readable violations (empty = clean).
std::vector<std::string> audit_log(const std::vector<experiment::EventRecord>& records);

} // namespace appealgate::sim
