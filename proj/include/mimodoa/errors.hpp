#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mimodoa {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A Corollary-style update whose denominator vanished. Happens when the
/// current partial steering set collides with the true sources so that every
/// term of the cross quadratic form is zero.
class DegenerateUpdate : public Error {
public:
    DegenerateUpdate(std::size_t update_index, const std::string& what)
        : Error(what), update_index_(update_index) {}

    std::size_t update_index() const noexcept { return update_index_; }

private:
    std::size_t update_index_;
};

/// Cost function came out non-finite or clearly negative, i.e. the covariance
/// handed to the estimator is not positive semidefinite.
class NonFiniteCost : public Error {
public:
    using Error::Error;
};

/// Steering phases that map outside the visible region (sin(theta) > 1).
class InconsistentSteering : public Error {
public:
    using Error::Error;
};

struct GridPeak {
    double theta_deg;
    double phi_deg;
    double value;
};

/// MUSIC found fewer local maxima than sources.
class PeakDeficit : public Error {
public:
    PeakDeficit(std::vector<GridPeak> found, const std::string& what)
        : Error(what), found_(std::move(found)) {}

    const std::vector<GridPeak>& found() const noexcept { return found_; }

private:
    std::vector<GridPeak> found_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Configuration rejected by validation; `field` names the offending entry.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace mimodoa
