#pragma once

#include <stdexcept>
#include <string>

namespace cwave {

// Input violates the decay or sign preconditions of a line operator.
class IllPosedInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Scenario keys missing or inconsistent. CLI exit code 2.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Initial geometry rejected (inadmissible corner, self-intersection,
// amplitude too large). CLI exit code 3.
class GeometryRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A time step could not be accepted (vanishing Z_{,α'}, residual ceiling).
class StepRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A Lagrangian marker left the truncated domain.
class MarkerExit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A bound monitor exceeded its ceiling. CLI exit code 4.
class MonitorBlowup : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cwave
