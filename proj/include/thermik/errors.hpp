#pragma once

#include <stdexcept>
#include <string>

namespace thermik {

/// Bad numeric or structural input to an operation (non-finite effort,
/// negative time step, cutoff above Nyquist, ...).
class InvalidInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or internally inconsistent document (model file, scenario,
/// telemetry CSV). Messages carry the offending entity or path.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A regression column has no variance; the message names the column.
class DegenerateDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Identified parameters are physically invalid (RC <= 0 or betaR <= 0).
class FitRejectedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gradient descent diverged; the learning rate is too large for the data.
class StepSizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration-dependent actuator effort map is singular at this q.
class SingularMapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The actuated DOFs cannot span the contact-consistent motion space.
class ActuationDeficiencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Descent start configuration violates the active contact constraints.
class InvalidStartError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A commanded plant configuration violates its contact constraints.
class InfeasibleCommandError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every candidate contact configuration failed to produce a minimizer.
class NoStrategyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace thermik
