#ifndef SFVQ_ERRORS_HPP
#define SFVQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sfvq {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad parameter values: empty requests, out-of-range indices, sizes too
// small, unknown enum names, invalid permutations.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Mismatched dimensions or shapes between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
public:
    using Error::Error;
};

// Malformed container contents (bad magic, truncated payload, ragged rows).
class FormatError : public Error {
public:
    using Error::Error;
};

// Filesystem-level failures (unreadable/unwritable paths).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace sfvq

#endif
