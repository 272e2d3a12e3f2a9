#pragma once

#include <stdexcept>
#include <string>

namespace fluxq {

enum class ExitCode : int { success = 0, validation = 2, nonconvergence = 3, physics = 4 };

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const { return code_; }

private:
    ExitCode code_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ExitCode::validation, what) {}
};

struct NonConvergenceError : Error {
    explicit NonConvergenceError(const std::string& what) : Error(ExitCode::nonconvergence, what) {}
};

// Physics-contract violations: monostable potential where a double well is
// required, boundary leak, reduction below the validity floor.
struct PhysicsError : Error {
    explicit PhysicsError(const std::string& what) : Error(ExitCode::physics, what) {}
};

}  // namespace fluxq
