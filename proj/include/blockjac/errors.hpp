#ifndef BLOCKJAC_ERRORS_HPP
#define BLOCKJAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace blockjac {

enum class Errc {
    invalid_argument,
    invalid_operator,
    not_positive_definite,
    singular_block,
    at_eigenvalue,
    multiplicity_mismatch,
    singular_weight,
    near_pole,
    singular_y,
    lanczos_breakdown,
    schema,
    io,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::invalid_operator: return "InvalidOperator";
        case Errc::not_positive_definite: return "NotPositiveDefinite";
        case Errc::singular_block: return "SingularBlock";
        case Errc::at_eigenvalue: return "AtEigenvalue";
        case Errc::multiplicity_mismatch: return "MultiplicityMismatch";
        case Errc::singular_weight: return "SingularWeight";
        case Errc::near_pole: return "NearPole";
        case Errc::singular_y: return "SingularY";
        case Errc::lanczos_breakdown: return "LanczosBreakdown";
        case Errc::schema: return "SchemaError";
        case Errc::io: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Raised by the block Lanczos reconstruction when the residual block loses
/// rank before the last stage. `stage` is 1-based.
class LanczosBreakdown : public Error {
public:
    LanczosBreakdown(int stage, double defect, const std::string& what)
        : Error(Errc::lanczos_breakdown, what), stage_(stage), defect_(defect) {}

    int stage() const noexcept { return stage_; }
    double defect() const noexcept { return defect_; }

private:
    int stage_;
    double defect_;
};

}  // namespace blockjac

#endif  // BLOCKJAC_ERRORS_HPP
