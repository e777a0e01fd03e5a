#ifndef FRFPCE_ERRORS_HPP
#define FRFPCE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace frfpce {

/// Invalid user input: bad config file, out-of-range settings, malformed data.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: singular systems, non-convergence, violated model assumptions.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem failure.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace frfpce

#endif
