#pragma once

#include <stdexcept>
#include <string>

namespace mscons {

// Error categories map 1:1 onto CLI exit codes:
//   validation -> 2, condition -> 3, numerical -> 4.
enum class ErrorKind { validation = 2, condition = 3, numerical = 4 };

class ToolkitError : public std::runtime_error {
public:
    ToolkitError(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

struct ValidationError : ToolkitError {
    explicit ValidationError(const std::string& msg)
        : ToolkitError(ErrorKind::validation, msg) {}
};

struct SchemaError : ValidationError {
    explicit SchemaError(const std::string& msg) : ValidationError(msg) {}
};

// A graph assumption required by the selected mode does not hold.
struct AssumptionViolated : ValidationError {
    explicit AssumptionViolated(const std::string& msg) : ValidationError(msg) {}
};

struct DisconnectedGraph : AssumptionViolated {
    explicit DisconnectedGraph(const std::string& msg) : AssumptionViolated(msg) {}
};

struct NotStabilizable : ValidationError {
    explicit NotStabilizable(const std::string& msg) : ValidationError(msg) {}
};

struct NumericalError : ToolkitError {
    explicit NumericalError(const std::string& msg)
        : ToolkitError(ErrorKind::numerical, msg) {}
};

struct MareDiverged : NumericalError {
    explicit MareDiverged(const std::string& msg) : NumericalError(msg) {}
};

// The requested uncertainty level sits outside the solvability guarantee
// and the iteration failed to settle.
struct DeltaOutOfRange : NumericalError {
    explicit DeltaOutOfRange(const std::string& msg) : NumericalError(msg) {}
};

struct SingularInnerTerm : NumericalError {
    explicit SingularInnerTerm(const std::string& msg) : NumericalError(msg) {}
};

struct NonConvergence : NumericalError {
    explicit NonConvergence(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace mscons
