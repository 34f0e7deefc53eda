#pragma once

#include <stdexcept>
#include <string>

namespace ave {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

/// Raised by rho / theta_k when the residual at the anchor point is zero.
class ZeroResidual : public Error {
public:
    using Error::Error;
};

/// The automatic inexact-Newton forcing term is negative (||A^-1|| >= 1/3).
class ThetaUndefined : public Error {
public:
    using Error::Error;
};

/// An inner LSQR solve could not meet the outer acceptance criterion.
class InnerSolverStall : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class GeneratorFailure : public Error {
public:
    using Error::Error;
};

class IncompleteGrid : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Parse failure carrying the 1-based line number of the offending input.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace ave
