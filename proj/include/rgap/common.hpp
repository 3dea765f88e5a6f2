#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace rgap {

// Error taxonomy. The CLI maps kinds onto exit codes (see tools/):
//   Config/Precondition/Schema/Parse -> 1, Upstream -> 2, Backend -> 3.
enum class ErrorKind {
    Config,        // bad configuration or capability violation
    Precondition,  // caller violated an operation precondition
    Schema,        // malformed record / fixture / config file
    Corruption,    // digest mismatch on stored data
    Backend,       // transport or backend-side failure
    Upstream,      // required upstream artifact missing
    Incomplete,    // run coverage gap (missing (language, seed) cells)
    Parse,         // structured output could not be parsed
    Metric,        // metric undefined on the given inputs
    Training,      // detector training cannot proceed
    Lock,          // cache writer lock already held
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return "config";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::Schema: return "schema";
        case ErrorKind::Corruption: return "corruption";
        case ErrorKind::Backend: return "backend";
        case ErrorKind::Upstream: return "upstream";
        case ErrorKind::Incomplete: return "incomplete";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Metric: return "metric";
        case ErrorKind::Training: return "training";
        case ErrorKind::Lock: return "lock";
    }
    return "unknown";
}

// Warnings go to stderr; pipelines stay quiet on stdout so reports pipe cleanly.
inline void warn(const std::string& message) {
    std::fprintf(stderr, "[rgap] warning: %s\n", message.c_str());
}

inline void info(const std::string& message) {
    std::fprintf(stderr, "[rgap] %s\n", message.c_str());
}

}  // namespace rgap
