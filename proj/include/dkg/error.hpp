#pragma once

#include <stdexcept>
#include <string>

namespace dkg {

/// Failure categories surfaced on the command line as `<Category>: message`.
enum class ErrorCategory {
    ConfigError,
    ResonantMass,
    TailNotConverged,
    BlowupDetected,
    IoError,
};

constexpr const char* to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::ConfigError: return "ConfigError";
        case ErrorCategory::ResonantMass: return "ResonantMass";
        case ErrorCategory::TailNotConverged: return "TailNotConverged";
        case ErrorCategory::BlowupDetected: return "BlowupDetected";
        case ErrorCategory::IoError: return "IoError";
    }
    return "Unknown";
}

class DkgError : public std::runtime_error {
public:
    DkgError(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& what) {
    throw DkgError(category, what);
}

}  // namespace dkg
