// errors.hpp — error hierarchy shared by all modules; codes mirror the C API status enum.

#pragma once

#include <stdexcept>
#include <string>

namespace scatterwork {

enum class ErrorCode {
    invalid_argument    = 1,
    validation          = 2,
    threshold_proximity = 3,
    singular_matching   = 4,
    numerical           = 5,
    domain              = 6,
    grid                = 7,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct InvalidArgumentError : Error {
    explicit InvalidArgumentError(const std::string& m) : Error(ErrorCode::invalid_argument, m) {}
};
struct ValidationError : Error {
    explicit ValidationError(const std::string& m) : Error(ErrorCode::validation, m) {}
};
struct ThresholdProximityError : Error {
    explicit ThresholdProximityError(const std::string& m) : Error(ErrorCode::threshold_proximity, m) {}
};
struct SingularMatchingError : Error {
    explicit SingularMatchingError(const std::string& m) : Error(ErrorCode::singular_matching, m) {}
};
struct NumericalError : Error {
    explicit NumericalError(const std::string& m) : Error(ErrorCode::numerical, m) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error(ErrorCode::domain, m) {}
};
struct GridError : Error {
    explicit GridError(const std::string& m) : Error(ErrorCode::grid, m) {}
};

} // namespace scatterwork
