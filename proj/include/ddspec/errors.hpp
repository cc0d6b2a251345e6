#pragma once

#include <stdexcept>
#include <string>

namespace ddspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A documented precondition (resolution, duration, coupling regime) does not hold.
class PreconditionViolation : public Error {
public:
    using Error::Error;
};

/// A numerical routine did not reach its tolerance.
class NumericFailure : public Error {
public:
    NumericFailure(const std::string& what, double achieved_error)
        : Error(what), achieved_error_(achieved_error) {}
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

class InconsistentMeasurement : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class InsufficientVariation : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool cond, const char* msg) {
    if (!cond) throw InvalidArgument(msg);
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidArgument(msg);
}

}  // namespace detail
}  // namespace ddspec
