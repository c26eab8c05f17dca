#pragma once

#include <stdexcept>
#include <string>

namespace hydrostat {

/// Bad user input: malformed files, out-of-range parameters, unknown names.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A simulation left its admissible state space (over-filled accumulator,
/// piston outside its stroke, pressure above rating).
class SimulationFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hydrostat
