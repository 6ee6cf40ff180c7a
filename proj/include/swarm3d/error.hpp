#pragma once

#include <stdexcept>
#include <string>

namespace swarm3d {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on geometric input was violated (zero direction, coincident points).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Malformed scenario description or configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Integration produced a non-finite state.
class SimulationAborted : public Error {
public:
    using Error::Error;
};

}  // namespace swarm3d
