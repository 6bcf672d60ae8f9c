#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace carlab {

// Every error carries a short machine-readable code; the CLI prints it as
// the failure reason.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    std::string_view code() const noexcept { return code_; }

private:
    std::string code_;
};

// Caller broke a documented precondition (wrong side, bad parameter).
class ContractViolation : public Error {
public:
    explicit ContractViolation(const std::string& what) : Error("contract", what) {}
};

// Symbol evaluated exactly on its singular set.
class SingularityError : public Error {
public:
    explicit SingularityError(const std::string& what) : Error("singularity", what) {}
};

// Grid cannot represent the requested operation without aliasing.
class ResolutionError : public Error {
public:
    explicit ResolutionError(const std::string& what) : Error("resolution", what) {}
};

// Field has mass where the operation requires it to vanish.
class SupportError : public Error {
public:
    explicit SupportError(const std::string& what) : Error("support", what) {}
};

class QuadratureError : public Error {
public:
    explicit QuadratureError(const std::string& what) : Error("quadrature", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace carlab
