#pragma once

#include <stdexcept>
#include <string>

namespace wsansim {

/// Invalid configuration, parameter, or input value. CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem or stream failure. CLI exit code 2.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace wsansim
