#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gridwaves {

/// Base class for all library errors that are not plain precondition
/// violations (those throw std::invalid_argument).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A mesh map failed monotonicity or bound certification on the given grid.
class InvalidMeshError : public Error {
public:
    using Error::Error;
};

/// The leapfrog iteration blew past the instability threshold.
class InstabilityError : public Error {
public:
    InstabilityError(int step, const std::string& msg) : Error(msg), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

/// Centroid of an (almost) all-zero field.
class UndefinedCentroidError : public Error {
public:
    using Error::Error;
};

/// d'Alembert evaluation outside the domain of dependence validity window.
class OutOfValidityError : public Error {
public:
    using Error::Error;
};

/// A single RK4 step moved the ray too far past the wall; dt is too coarse.
class StepRejectionError : public Error {
public:
    using Error::Error;
};

/// Zero total symbol: the 2D ray time normalization is undefined.
class DegenerateRayError : public Error {
public:
    using Error::Error;
};

/// No turning point inside (0, 1]: the orbit is not trapped on this axis.
class NotTrappedError : public Error {
public:
    using Error::Error;
};

/// The symmetrized operator is not positive definite.
class InvalidOperatorError : public Error {
public:
    using Error::Error;
};

/// One located problem in a config file.
struct ConfigIssue {
    int line = 0;
    std::string key;
    std::string message;
};

/// Aggregate config failure carrying all located issues.
class ConfigError : public Error {
public:
    ConfigError(std::string summary, std::vector<ConfigIssue> issues)
        : Error(std::move(summary)), issues_(std::move(issues)) {}
    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

}
