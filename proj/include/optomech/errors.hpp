#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

// Validation failures (bad input, malformed config) map to CLI exit code 1.
// Physics failures (instability, unresolved sidebands, blow-up) map to 2.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class RatioUndefinedError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class TruncationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& msg, int line)
        : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class PhysicsError : public Error {
public:
    using Error::Error;
};

class UnphysicalShiftError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

class DegenerateSystemError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

class SingularResolventError : public PhysicsError {
public:
    SingularResolventError(const std::string& msg, double eig_re, double eig_im)
        : PhysicsError(msg), re_(eig_re), im_(eig_im) {}
    double eigen_real() const noexcept { return re_; }
    double eigen_imag() const noexcept { return im_; }

private:
    double re_;
    double im_;
};

class NotSidebandResolvedError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

class InstabilityError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

class BlowUpError : public PhysicsError {
public:
    BlowUpError(const std::string& msg, long long step) : PhysicsError(msg), step_(step) {}
    long long step() const noexcept { return step_; }

private:
    long long step_;
};

}  // namespace optomech
