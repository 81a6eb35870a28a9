#pragma once

#include <stdexcept>
#include <string>

namespace levylab {

struct NoRootError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KappaNotAboveOneError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidKappaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A stopping event did not occur within the configured step budget.
struct HorizonCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A subordinator path ended before its second component passed the target level.
struct HorizonTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientTriples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace levylab
