#pragma once

#include <stdexcept>
#include <string>

namespace geodyn {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parser errors --------------------------------------------------------

struct SyntaxError : Error {
    SyntaxError(std::size_t offset, std::string expected)
        : Error("syntax error at byte " + std::to_string(offset) +
                ": expected " + expected),
          offset(offset),
          expected(std::move(expected)) {}
    std::size_t offset;
    std::string expected;
};

struct UnknownIdentifier : Error {
    UnknownIdentifier(std::size_t offset, std::string name)
        : Error("unknown identifier '" + name + "' at byte " +
                std::to_string(offset)),
          offset(offset),
          name(std::move(name)) {}
    std::size_t offset;
    std::string name;
};

struct IndexOutOfRange : Error {
    IndexOutOfRange(std::size_t offset, int index, int dim)
        : Error("variable x" + std::to_string(index) + " exceeds dimension " +
                std::to_string(dim) + " (byte " + std::to_string(offset) + ")"),
          offset(offset),
          index(index),
          dim(dim) {}
    std::size_t offset;
    int index;
    int dim;
};

// Evaluation errors ----------------------------------------------------

struct DomainError : Error {
    DomainError(std::string what, std::string subexpr)
        : Error(what + " in subexpression '" + subexpr + "'"),
          subexpr(std::move(subexpr)) {}
    std::string subexpr;
};

struct UnboundParameter : Error {
    explicit UnboundParameter(const std::string& name)
        : Error("parameter '" + name + "' is not bound"), name(name) {}
    std::string name;
};

// Geometry errors ------------------------------------------------------

struct SingularMetric : Error {
    SingularMetric(double det)
        : Error("metric is singular (det = " + std::to_string(det) + ")"),
          det(det) {}
    double det;
};

struct DegenerateConformalFactor : Error {
    explicit DegenerateConformalFactor(double factor)
        : Error("conformal factor H0 + f = " + std::to_string(factor) +
                " is inside the degeneracy band"),
          factor(factor) {}
    double factor;
};

struct DegenerateForm : Error {
    explicit DegenerateForm(double det)
        : Error("2-form is degenerate (det = " + std::to_string(det) + ")"),
          det(det) {}
    double det;
};

// Integration errors ---------------------------------------------------

struct StepSizeUnderflow : Error {
    StepSizeUnderflow(double t, double dt)
        : Error("step size underflow at t = " + std::to_string(t) +
                " (dt = " + std::to_string(dt) + ")"),
          t(t),
          dt(dt) {}
    double t;
    double dt;
};

struct NonFiniteState : Error {
    explicit NonFiniteState(double t)
        : Error("non-finite state encountered at t = " + std::to_string(t)),
          t(t) {}
    double t;
};

struct VanishingVelocity : Error {
    explicit VanishingVelocity(double t)
        : Error("velocity vanishes at t = " + std::to_string(t) +
                "; reparametrization undefined"),
          t(t) {}
    double t;
};

struct UnsupportedSystem : Error {
    using Error::Error;
};

struct EmptySample : Error {
    EmptySample() : Error("empty sample") {}
};

struct ThresholdUndefined : Error {
    ThresholdUndefined() : Error("chaos threshold undefined: sigma - b - 1 = 0") {}
};

}  // namespace geodyn
