#pragma once

#include <stdexcept>
#include <string>

namespace boundwave {

enum class ErrorKind {
    Domain,     // argument outside an operation's precondition
    Config,     // invalid run configuration
    Capacity,   // requested sizes exceed a memory or dense-solver bound
    Precision,  // evaluation scheme cannot deliver significant digits
    Numerical,  // blow-up or wrap-around during a computation
    Conditioning,  // linear algebra too ill-conditioned to trust
};

/// Base of every error raised by the library. `module()` names the originating
/// module so the CLI can surface it together with the parameters of the run.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), kind_(kind), module_(std::move(module)) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

class DomainError : public Error {
public:
    DomainError(std::string module, const std::string& what) : Error(ErrorKind::Domain, std::move(module), what) {}
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& what) : Error(ErrorKind::Config, "config", what) {}
};

class CapacityError : public Error {
public:
    CapacityError(std::string module, const std::string& what) : Error(ErrorKind::Capacity, std::move(module), what) {}
};

class PrecisionError : public Error {
public:
    PrecisionError(std::string module, const std::string& what) : Error(ErrorKind::Precision, std::move(module), what) {}
};

class NumericalError : public Error {
public:
    NumericalError(std::string module, const std::string& what) : Error(ErrorKind::Numerical, std::move(module), what) {}
};

class ConditioningError : public Error {
public:
    ConditioningError(std::string module, const std::string& what)
        : Error(ErrorKind::Conditioning, std::move(module), what) {}
};

}  // namespace boundwave
