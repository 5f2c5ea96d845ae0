#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "appealgate/core/types.hpp"
#include "appealgate/experiment/event_log.hpp"

namespace appealgate::experiment {

struct Assignment {
    core::UserId user;
    core::Group group = core::Group::Control;
    core::Timestamp assigned_at = 0;
};

// Deterministic keyed randomization: group = hash(seed, user) < ratio. An
// existing assignment is always returned unchanged, so a user re-banned later
// stays in their original group.
class AssignmentStore {
public:
    AssignmentStore(double ratio, std::uint64_t seed, EventSink& log);

    const Assignment& assign(const core::UserId& user, core::Timestamp now);
    const Assignment* find(const core::UserId& user) const;

    // True predicted-probability-of-success values recorded into the
    // assignment event payload when known (simulation runs).
    void set_pps_hint(const core::UserId& user, double pps);

    double ratio() const { return ratio_; }
    std::uint64_t seed() const { return seed_; }

    static double uniform_for(std::uint64_t seed, const core::UserId& user);

private:
    double ratio_;
    std::uint64_t seed_;
    EventSink& log_;
    std::map<core::UserId, Assignment> assignments_;
    std::map<core::UserId, double> pps_hints_;
};

} // namespace appealgate::experiment
