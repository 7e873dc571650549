#pragma once

#include <stdexcept>
#include <string>

namespace minsurf {

// Root of every library error. `kind()` is a stable short tag used by the CLI
// to decide exit codes and by tests to match failure modes.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define MINSURF_ERROR(Name)                                                  \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name, what) {}       \
    }

// quad
MINSURF_ERROR(SubdivisionLimit);
MINSURF_ERROR(NonFinite);
MINSURF_ERROR(Divergent);
// curve
MINSURF_ERROR(ClearanceViolation);
MINSURF_ERROR(BranchAmbiguity);
MINSURF_ERROR(PoleOfGaussMap);
// classical
MINSURF_ERROR(DomainError);
MINSURF_ERROR(ConvergenceError);
// shiffkdv
MINSURF_ERROR(NotExactDerivative);
MINSURF_ERROR(JetTooShort);
MINSURF_ERROR(GridTooSmall);
MINSURF_ERROR(RankDeficient);
// mesh
MINSURF_ERROR(DegenerateCell);
MINSURF_ERROR(Degenerate);
MINSURF_ERROR(IoError);
// cli
MINSURF_ERROR(ConfigError);

#undef MINSURF_ERROR

}  // namespace minsurf
