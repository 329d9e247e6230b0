#pragma once

#include <stdexcept>
#include <string>

namespace proxloc {

// Malformed input data (CSV/JSON). Carries a human-readable location so the
// CLI can report "row N, column M" style messages. Maps to exit code 2.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Numerically degenerate situation: a fit without enough distinct abscissae,
// a singular innovation covariance. Maps to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace proxloc
