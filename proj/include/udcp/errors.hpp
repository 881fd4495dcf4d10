#pragma once

#include <stdexcept>
#include <string>

namespace udcp {

// Bad inputs: wrong lengths, out-of-range parameters, malformed files.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A claimed property failed re-verification (e.g. a pair is not a UDCP,
// or two independent computation routes disagree).
struct VerificationError : std::runtime_error {
    explicit VerificationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace udcp
