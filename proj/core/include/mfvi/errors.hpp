#pragma once

#include <stdexcept>
#include <string>

namespace mfvi {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// measure_core
struct NonFiniteError : Error { using Error::Error; };
struct AllZeroError : Error { using Error::Error; };
struct OutOfDomainError : Error { using Error::Error; };

// target_model / functionals
struct DimensionMismatchError : Error { using Error::Error; };
struct QuadratureOverflowError : Error { using Error::Error; };

// solvers
struct UnderflowError : Error { using Error::Error; };
struct MonotonicityCollapseError : Error { using Error::Error; };
struct CflViolationError : Error { using Error::Error; };
struct TridiagonalSingularError : Error { using Error::Error; };
struct EmptyWindowError : Error { using Error::Error; };
struct GridMismatchError : Error { using Error::Error; };
struct TooManyAtomsError : Error { using Error::Error; };
struct DivergenceError : Error { using Error::Error; };

struct SolverFailureError : Error {
    SolverFailureError(std::string method_, const std::string& what_)
        : Error(method_ + ": " + what_), method(std::move(method_)) {}
    std::string method;
};

// config
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

}  // namespace mfvi
