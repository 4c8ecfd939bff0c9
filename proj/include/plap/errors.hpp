#pragma once

#include <stdexcept>
#include <string>

namespace plap {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedExponent : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct SingularAtZero : Error {
    using Error::Error;
};

struct MissingDerivative : Error {
    using Error::Error;
};

struct GridMismatch : Error {
    using Error::Error;
};

struct NonVariational : Error {
    using Error::Error;
};

struct NoBracket : Error {
    using Error::Error;
};

struct NewtonDiverged : Error {
    using Error::Error;
};

struct NotAContactPoint : Error {
    using Error::Error;
};

struct HypothesisNotMet : Error {
    using Error::Error;
};

struct NoContactPoint : Error {
    using Error::Error;
};

struct StructureViolation : Error {
    using Error::Error;
};

struct ParamsViolateFamilyBounds : Error {
    using Error::Error;
};

struct BadInput : Error {
    using Error::Error;
};

}  // namespace plap
