#pragma once

#include <stdexcept>
#include <string>

namespace rotorlab {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical guard failures: the momentum basis cannot hold the state.
class BasisTooSmall : public Error {
public:
    BasisTooSmall(const std::string& what, double edge_population)
        : Error(what), edge_population_(edge_population) {}

    double edge_population() const noexcept { return edge_population_; }

private:
    double edge_population_;
};

// Malformed configuration text; line is 0 when the problem is not tied to a line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace rotorlab
