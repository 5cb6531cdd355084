#pragma once

#include <stdexcept>
#include <string>

namespace tsboost {

/// Invalid or inconsistent experiment configuration. CLI exit status 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data or shape violations. CLI exit status 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Degenerate or non-finite numerics (e.g. a zero metric denominator). CLI exit status 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tsboost
