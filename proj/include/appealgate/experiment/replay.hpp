#pragma once

#include <memory>
#include <vector>

#include "appealgate/core/engine.hpp"
#include "appealgate/experiment/event_log.hpp"
#include "appealgate/platform/platform.hpp"
#include "appealgate/webform/form.hpp"

namespace appealgate::experiment {

struct ReplayContext {
    core::EngineConfig engine;
    webform::FormDefinition form;
    double assignment_ratio = 0.5;
    std::uint64_t assignment_seed = 0;
};

// Checks every append against the expected record stream; replay is only
// accepted when the engine regenerates the log bit-for-bit.
class ValidatingSink : public EventSink {
public:
    explicit ValidatingSink(const std::vector<EventRecord>& expected) : expected_(expected) {}

    void append(EventType type, core::Timestamp ts, std::string conversation, std::string user,
                nlohmann::json payload) override;

    std::size_t cursor() const { return cursor_; }
    const EventRecord& peek() const;
    bool done() const { return cursor_ >= expected_.size(); }

private:
    const std::vector<EventRecord>& expected_;
    std::size_t cursor_ = 0;
};

// The full reconstructed stack. Snapshots of the live stack and the replayed
// stack must compare equal.
struct ReplayedState {
    std::unique_ptr<ValidatingSink> sink;
    std::unique_ptr<platform::SimulatedPlatform> platform;
    std::unique_ptr<webform::FormService> form;
    std::unique_ptr<AssignmentStore> assignments;
    std::unique_ptr<core::AppealEngine> engine;

    nlohmann::json snapshot() const;
};

// Event-sourced reconstruction: world-input events are re-applied and pumped
// through a fresh engine; engine outputs are validated against the log.
// Throws CorruptLogError on any mismatch, gap, or unexplained output event.
ReplayedState replay(const std::vector<EventRecord>& records, const ReplayContext& context);

} // namespace appealgate::experiment
