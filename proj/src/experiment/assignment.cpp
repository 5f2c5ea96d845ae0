#include "appealgate/experiment/assignment.hpp"

#include "appealgate/common/errors.hpp"
#include "appealgate/common/rng.hpp"

namespace appealgate::experiment {

AssignmentStore::AssignmentStore(double ratio, std::uint64_t seed, EventSink& log)
    : ratio_(ratio), seed_(seed), log_(log) {
    if (ratio < 0.0 || ratio > 1.0) throw ValidationError("assignment ratio must be in [0, 1]");
}

double AssignmentStore::uniform_for(std::uint64_t seed, const core::UserId& user) {
    const std::uint64_t h = splitmix64(seed ^ fnv1a64(user));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

const Assignment& AssignmentStore::assign(const core::UserId& user, core::Timestamp now) {
    auto it = assignments_.find(user);
    if (it != assignments_.end()) return it->second;

    Assignment a;
    a.user = user;
    a.group = uniform_for(seed_, user) < ratio_ ? core::Group::Treatment : core::Group::Control;
    a.assigned_at = now;
    it = assignments_.emplace(user, a).first;

    nlohmann::json payload;
    payload["group"] = core::to_string(a.group);
    auto hint = pps_hints_.find(user);
    if (hint != pps_hints_.end()) payload["pps"] = hint->second;
    log_.append(EventType::Assignment, now, "", user, std::move(payload));
    return it->second;
}

const Assignment* AssignmentStore::find(const core::UserId& user) const {
    auto it = assignments_.find(user);
    return it == assignments_.end() ? nullptr : &it->second;
}

void AssignmentStore::set_pps_hint(const core::UserId& user, double pps) {
    if (pps < 0.0 || pps > 1.0) throw ValidationError("pps hint must be in [0, 1]");
    pps_hints_[user] = pps;
}

} // namespace appealgate::experiment
