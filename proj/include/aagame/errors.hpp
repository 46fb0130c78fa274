#pragma once

#include <stdexcept>
#include <string>

namespace aagame {

// Bad argument to an operation (out-of-range index, dimension mismatch,
// empty window).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid run or pool configuration (K = 0, d < 1, eta outside (0, 1]).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite intermediate value.
class NumericError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Cohort data that violates the data model (malformed CSV, bad triplets,
// negative intensities, missing features).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace aagame
