#include "appealgate/core/types.hpp"

namespace appealgate::core {

const char* to_string(Group group) {
    return group == Group::Control ? "control" : "treatment";
}

const char* to_string(Decision decision) {
    switch (decision) {
        case Decision::Granted: return "granted";
        case Decision::Denied: return "denied";
        case Decision::Ignored: return "ignored";
        case Decision::Muted: return "muted";
    }
    return "?";
}

const char* to_string(StateKind kind) {
    switch (kind) {
        case StateKind::ControlOpen: return "control_open";
        case StateKind::Bypassed: return "bypassed";
        case StateKind::TreatmentAwaitingForm: return "treatment_awaiting_form";
        case StateKind::TreatmentCompleted: return "treatment_completed";
        case StateKind::Decided: return "decided";
    }
    return "?";
}

const char* to_string(Role role) {
    switch (role) {
        case Role::BannedUser: return "user";
        case Role::Moderator: return "moderator";
        case Role::Bot: return "bot";
    }
    return "?";
}

const char* to_string(BotActionKind kind) {
    switch (kind) {
        case BotActionKind::Reply: return "reply";
        case BotActionKind::Archive: return "archive";
        case BotActionKind::Unarchive: return "unarchive";
        case BotActionKind::PostPrivateNote: return "note";
        case BotActionKind::None: return "none";
    }
    return "?";
}

} // namespace appealgate::core
