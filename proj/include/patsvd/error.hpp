#pragma once

#include <stdexcept>
#include <string>

namespace patsvd {

/// Root of every exception thrown by the library. `kind()` gives a stable
/// lowercase tag the CLI prints next to the stage label.
class Error : public std::runtime_error {
public:
    Error(const char* kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    const char* kind() const noexcept { return kind_; }

private:
    const char* kind_;
};

#define PATSVD_ERROR_KIND(Name, tag)                                            \
    class Name : public Error {                                                 \
    public:                                                                     \
        explicit Name(const std::string& what) : Error(tag, what) {}            \
    }

PATSVD_ERROR_KIND(DomainError, "domain");
PATSVD_ERROR_KIND(ConfigError, "config");
PATSVD_ERROR_KIND(NumericalError, "numerical");
PATSVD_ERROR_KIND(ShapeError, "shape");
PATSVD_ERROR_KIND(IndexError, "index");
PATSVD_ERROR_KIND(IoError, "io");
PATSVD_ERROR_KIND(TypeError, "type");

#undef PATSVD_ERROR_KIND

/// Raised when the explicit time stepper produces a non-finite value.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, long step)
        : Error("divergence", what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

} // namespace patsvd
