#pragma once

#include <stdexcept>
#include <string>

namespace qduffing {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameter or configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A trajectory left the region where the attractors live, or went non-finite.
class TrajectoryEscaped : public Error {
public:
    TrajectoryEscaped(const std::string& what, double t) : Error(what), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Requested basis dimension exceeds the configured limit.
class CapacityError : public Error {
public:
    using Error::Error;
};

}  // namespace qduffing
