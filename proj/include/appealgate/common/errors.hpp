#pragma once

#include <stdexcept>
#include <string>

namespace appealgate {

// Bad input that the caller could have validated.
struct ValidationError : std::invalid_argument {
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Transient failure; the operation may be retried unchanged.
struct OutageError : std::runtime_error {
    explicit OutageError(const std::string& what) : std::runtime_error(what) {}
};

// Event log failed a structural check (seq gap, bad header, mismatched replay).
struct CorruptLogError : std::runtime_error {
    explicit CorruptLogError(const std::string& what) : std::runtime_error(what) {}
};

struct NotFoundError : std::runtime_error {
    explicit NotFoundError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace appealgate
