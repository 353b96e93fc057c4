#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace optomem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameter values violate a documented invariant.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// The mode formula produced a non-finite value; `term()` names the culprit.
class SingularConfiguration : public Error {
public:
    SingularConfiguration(std::string term, const std::string& what)
        : Error(what), term_(std::move(term)) {}
    const std::string& term() const noexcept { return term_; }

private:
    std::string term_;
};

/// Root finding failed. The message carries the scanned interval and sign table.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// An operation that requires a stable linearized model received an unstable one.
class InstabilityError : public Error {
public:
    InstabilityError(double margin, const std::string& what) : Error(what), margin_(margin) {}
    double margin() const noexcept { return margin_; }

private:
    double margin_;
};

/// A frequency scan reached a step with no stable steady state.
class NoStableSolution : public Error {
public:
    NoStableSolution(int step, double laser_omega, const std::string& what)
        : Error(what), step_(step), laser_omega_(laser_omega) {}
    int step() const noexcept { return step_; }
    double laser_omega() const noexcept { return laser_omega_; }

private:
    int step_;
    double laser_omega_;
};

/// A covariance matrix failed a physicality or contract check.
class InvalidState : public Error {
public:
    using Error::Error;
};

}  // namespace optomem
