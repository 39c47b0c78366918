#pragma once

#include <stdexcept>
#include <string>

namespace tdsmps {

/// Mismatched tensor extents or matrix shapes.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Non-finite input or a failed factorization.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bond or site index outside the chain.
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Argument outside the mathematical domain of a formula.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Invalid model, plan or construction parameter.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Dense object would exceed the configured size cap.
struct SizeError : std::length_error {
    using std::length_error::length_error;
};

/// Series too short or otherwise unusable for an analysis.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed config, CSV or checkpoint input.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, long line = -1)
        : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    [[nodiscard]] long line() const noexcept { return line_; }

private:
    long line_;
};

/// Resource budget exhausted during a run.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tdsmps
