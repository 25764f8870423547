#pragma once

#include <stdexcept>
#include <string>

namespace cilc {

/// Base class for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

/// Plant matrix fails the invertibility tolerance.
struct SingularPlant : Error {
    using Error::Error;
};

struct EmptyCollective : Error {
    using Error::Error;
};

/// Raised by operations that only exist in a fixed dimension (e.g. the
/// N = 2 contraction locus).
struct UnsupportedDimension : Error {
    using Error::Error;
};

struct NotStronglyConnected : Error {
    NotStronglyConnected(const std::string& msg, int from_, int to_)
        : Error(msg), from(from_), to(to_) {}
    int from; // witness pair: no directed path from -> to
    int to;
};

struct Uncontrollable : Error {
    using Error::Error;
};

struct BadPoleSet : Error {
    using Error::Error;
};

/// Simulation guard tripped (state left the safe envelope).
struct NumericalBlowup : Error {
    NumericalBlowup(const std::string& msg, int trial_, int sample_)
        : Error(msg), trial(trial_), sample(sample_) {}
    int trial;  // -1 when the failure is not tied to a trial loop
    int sample; // sample index within the trial
};

struct IllPosed : Error {
    using Error::Error;
};

struct SequenceTooShort : Error {
    using Error::Error;
};

/// Scenario/config file validation failure (field-level message).
struct ConfigError : Error {
    using Error::Error;
};

} // namespace cilc
