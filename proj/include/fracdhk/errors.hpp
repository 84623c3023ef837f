#pragma once

#include <stdexcept>
#include <string>

namespace fracdhk {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pointwise evaluation or a norm was requested at an order where it is undefined.
struct OrderTooHigh : Error {
    using Error::Error;
};

/// A pairing needed derivatives the supplied function cannot produce.
struct DerivativeUnavailable : Error {
    using Error::Error;
};

/// Argument outside the mathematical domain (e.g. gamma at x <= 0).
struct DomainError : Error {
    using Error::Error;
};

/// Adaptive quadrature exhausted its refinement budget without meeting tolerance.
struct QuadratureNonConvergence : Error {
    using Error::Error;
};

/// Smoothness precondition J_a^{m-n}f in C^m failed its numerical certificate.
struct NotInCm : Error {
    using Error::Error;
};

/// The C^n certificate for a decomposition failed.
struct NotInCn : Error {
    using Error::Error;
};

/// Catalog construction parameters outside the documented range.
struct ParameterOutOfRange : Error {
    using Error::Error;
};

} // namespace fracdhk
