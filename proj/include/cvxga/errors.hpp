#pragma once

#include <stdexcept>
#include <string>

namespace cvxga {

// Shape disagreement between operands (vector dims, row counts, ...).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Invalid user-supplied parameter (k = 0, r > d, bad fractions, ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A sampled tuple whose cross product vanished; callers resample.
struct DegenerateTupleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Solver produced a non-finite objective; indicates a step-size bug.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Delimited-file parse failure, carries the 1-based line number.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, long line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
    long line;
};

// HTTP embedding fetch failed after retries.
struct FetchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cvxga
