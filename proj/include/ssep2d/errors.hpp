#pragma once

#include <stdexcept>
#include <string>

namespace ssep2d {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameter outside the admissible domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class SizingError : public Error {
public:
    SizingError(const std::string& what, std::size_t count)
        : Error(what), count_(count) {}
    std::size_t count() const noexcept { return count_; }

private:
    std::size_t count_;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class UndefinedCoordinateError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

class SupportError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class StateSpaceError : public Error {
public:
    StateSpaceError(const std::string& what, std::size_t states)
        : Error(what), states_(states) {}
    std::size_t states() const noexcept { return states_; }

private:
    std::size_t states_;
};

class RateOverflowError : public Error {
public:
    RateOverflowError(const std::string& what, double max_delta)
        : Error(what), max_delta_(max_delta) {}
    double max_delta() const noexcept { return max_delta_; }

private:
    double max_delta_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double gradient_norm)
        : Error(what), gradient_norm_(gradient_norm) {}
    double gradient_norm() const noexcept { return gradient_norm_; }

private:
    double gradient_norm_;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : Error(field.empty() ? message : field + ": " + message), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace ssep2d
