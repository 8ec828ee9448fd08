#ifndef BLOCKJAC_OPERATOR_HPP
#define BLOCKJAC_OPERATOR_HPP

#include <string>
#include <vector>

#include "matrix.hpp"

namespace blockjac {

/// Normalization class of the off-diagonal blocks.
enum class Flavor {
    splus,    // a_n = a_n* > 0
    lplus,    // a_n lower triangular, real positive diagonal
    general,  // only det a_n != 0
};

inline const char* flavor_name(Flavor f) {
    switch (f) {
        case Flavor::splus: return "splus";
        case Flavor::lplus: return "lplus";
        case Flavor::general: return "general";
    }
    return "general";
}

inline Flavor parse_flavor(const std::string& s) {
    if (s == "splus") return Flavor::splus;
    if (s == "lplus") return Flavor::lplus;
    if (s == "general") return Flavor::general;
    throw Error(Errc::invalid_argument, "unknown flavor '" + s + "'");
}

/// Finite block Jacobi operator with p diagonal blocks b_1..b_p and p-1
/// off-diagonal blocks a_1..a_{p-1}, all m x m.
///
/// Indices in the accessors are 1-based like the recurrence. The boundary
/// blocks a_0 and a_p are the identity.
struct BlockJacobiOperator {
    Index m = 0;
    Index p = 0;
    std::vector<Matrix> b;  // b[n-1] = b_n
    std::vector<Matrix> a;  // a[n-1] = a_n
    Flavor flavor = Flavor::general;

    const Matrix& b_block(Index n) const { return b[static_cast<std::size_t>(n - 1)]; }

    Matrix a_block(Index n) const {
        if (n == 0 || n == p) return Matrix::Identity(m, m);
        return a[static_cast<std::size_t>(n - 1)];
    }
};

/// Throws InvalidOperator describing the first violated class constraint.
inline void validate_operator(const BlockJacobiOperator& J, const Tolerances& tol = default_tolerances) {
    auto fail = [](const std::string& msg) { throw Error(Errc::invalid_operator, msg); };
    if (J.m < 1 || J.p < 1) fail("m and p must be positive");
    if (static_cast<Index>(J.b.size()) != J.p) fail("expected p diagonal blocks");
    if (static_cast<Index>(J.a.size()) != J.p - 1) fail("expected p-1 off-diagonal blocks");
    for (Index n = 1; n <= J.p; ++n) {
        const Matrix& bn = J.b_block(n);
        if (bn.rows() != J.m || bn.cols() != J.m) fail("b_" + std::to_string(n) + " has wrong shape");
        if (!is_hermitian(bn, tol)) fail("b_" + std::to_string(n) + " is not Hermitian");
    }
    for (Index n = 1; n < J.p; ++n) {
        const Matrix& an = J.a[static_cast<std::size_t>(n - 1)];
        const std::string name = "a_" + std::to_string(n);
        if (an.rows() != J.m || an.cols() != J.m) fail(name + " has wrong shape");
        if (!all_finite(an)) fail(name + " has non-finite entries");
        const RealVector s = singular_values(an);
        if (!(s(s.size() - 1) > tol.sing * s(0))) fail(name + " is numerically singular");
        if (J.flavor == Flavor::splus) {
            if (!is_hermitian(an, tol) || !(min_eigenvalue(an) > 0.0))
                fail(name + " is not Hermitian positive definite");
        } else if (J.flavor == Flavor::lplus) {
            if (!is_lower_triangular_positive(an, tol))
                fail(name + " is not lower triangular with positive diagonal");
        }
    }
}

/// Dense mp x mp matrix with b_n on the diagonal, a_n above and a_n* below.
inline Matrix assemble_dense(const BlockJacobiOperator& J) {
    const Index m = J.m;
    Matrix H = Matrix::Zero(m * J.p, m * J.p);
    for (Index n = 0; n < J.p; ++n) H.block(n * m, n * m, m, m) = J.b[static_cast<std::size_t>(n)];
    for (Index n = 0; n + 1 < J.p; ++n) {
        const Matrix& an = J.a[static_cast<std::size_t>(n)];
        H.block(n * m, (n + 1) * m, m, m) = an;
        H.block((n + 1) * m, n * m, m, m) = an.adjoint();
    }
    return H;
}

enum class SolutionKind { phi, chi };

/// Values v_0..v_{p+1} of a fundamental solution at one point z, and
/// optionally their z-derivatives.
struct SolutionEval {
    Complex z;
    SolutionKind kind = SolutionKind::phi;
    std::vector<Matrix> values;
    std::vector<Matrix> derivs;  // empty unless requested

    bool has_derivs() const { return !derivs.empty(); }
    const Matrix& operator[](Index n) const { return values[static_cast<std::size_t>(n)]; }
    const Matrix& deriv(Index n) const { return derivs[static_cast<std::size_t>(n)]; }
};

namespace detail {

inline Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& a, Index n, const Tolerances& tol) {
    Eigen::PartialPivLU<Matrix> lu(a);
    if (!(lu.rcond() > tol.sing))
        throw Error(Errc::singular_block, "a_" + std::to_string(n) + " is numerically singular");
    return lu;
}

}  // namespace detail

/// Left-pinned solution: phi_0 = 0, phi_1 = I, then
/// phi_{n+1} = a_n^{-1}((z - b_n) phi_n - a_{n-1}* phi_{n-1}) for n = 1..p.
inline SolutionEval eval_phi(const BlockJacobiOperator& J, Complex z, bool with_derivs = false,
                             const Tolerances& tol = default_tolerances) {
    const Index m = J.m;
    const Index p = J.p;
    const Matrix I = Matrix::Identity(m, m);
    SolutionEval out{z, SolutionKind::phi, {}, {}};
    out.values.resize(static_cast<std::size_t>(p + 2));
    out.values[0] = Matrix::Zero(m, m);
    out.values[1] = I;
    if (with_derivs) {
        out.derivs.assign(static_cast<std::size_t>(p + 2), Matrix::Zero(m, m));
    }
    for (Index n = 1; n <= p; ++n) {
        const auto un = static_cast<std::size_t>(n);
        const Matrix shift = z * I - J.b_block(n);
        const Matrix back = J.a_block(n - 1).adjoint();
        Matrix rhs = shift * out.values[un] - back * out.values[un - 1];
        Matrix drhs;
        if (with_derivs) drhs = shift * out.derivs[un] + out.values[un] - back * out.derivs[un - 1];
        if (n == p) {
            out.values[un + 1] = std::move(rhs);
            if (with_derivs) out.derivs[un + 1] = std::move(drhs);
        } else {
            const auto lu = detail::checked_lu(J.a_block(n), n, tol);
            out.values[un + 1] = lu.solve(rhs);
            if (with_derivs) out.derivs[un + 1] = lu.solve(drhs);
        }
    }
    return out;
}

/// Right-pinned solution: chi_{p+1} = 0, chi_p = I, then
/// chi_{n-1} = (a_{n-1}*)^{-1}((z - b_n) chi_n - a_n chi_{n+1}) for n = p..1.
inline SolutionEval eval_chi(const BlockJacobiOperator& J, Complex z, bool with_derivs = false,
                             const Tolerances& tol = default_tolerances) {
    const Index m = J.m;
    const Index p = J.p;
    const Matrix I = Matrix::Identity(m, m);
    SolutionEval out{z, SolutionKind::chi, {}, {}};
    out.values.assign(static_cast<std::size_t>(p + 2), Matrix::Zero(m, m));
    out.values[static_cast<std::size_t>(p)] = I;
    if (with_derivs) out.derivs.assign(static_cast<std::size_t>(p + 2), Matrix::Zero(m, m));
    for (Index n = p; n >= 1; --n) {
        const auto un = static_cast<std::size_t>(n);
        const Matrix shift = z * I - J.b_block(n);
        const Matrix fwd = J.a_block(n);
        Matrix rhs = shift * out.values[un] - fwd * out.values[un + 1];
        Matrix drhs;
        if (with_derivs) drhs = shift * out.derivs[un] + out.values[un] - fwd * out.derivs[un + 1];
        if (n == 1) {
            out.values[0] = std::move(rhs);
            if (with_derivs) out.derivs[0] = std::move(drhs);
        } else {
            const auto lu = detail::checked_lu(J.a_block(n - 1).adjoint(), n - 1, tol);
            out.values[un - 1] = lu.solve(rhs);
            if (with_derivs) out.derivs[un - 1] = lu.solve(drhs);
        }
    }
    return out;
}

/// Largest residual of a_n v_{n+1} + (b_n - z) v_n + a_{n-1}* v_{n-1} over n = 1..p.
inline double recurrence_residual(const BlockJacobiOperator& J, const SolutionEval& s) {
    const Matrix I = Matrix::Identity(J.m, J.m);
    double worst = 0.0;
    for (Index n = 1; n <= J.p; ++n) {
        const Matrix r = J.a_block(n) * s[n + 1] + (J.b_block(n) - s.z * I) * s[n] +
                         J.a_block(n - 1).adjoint() * s[n - 1];
        worst = std::max(worst, r.norm());
    }
    return worst;
}

/// The pairing {theta, eta}_n = theta_n*(conj z) a_n eta_{n+1}(z) - theta_{n+1}*(conj z) a_n* eta_n(z),
/// n = 0..p. `theta` must be evaluated at the conjugate of eta's point.
inline Matrix wronskian(const BlockJacobiOperator& J, const SolutionEval& theta, const SolutionEval& eta,
                        Index n) {
    if (std::abs(theta.z - std::conj(eta.z)) > 1e-14 * (1.0 + std::abs(eta.z)))
        throw Error(Errc::invalid_argument, "wronskian: theta must be evaluated at conj(z)");
    if (n < 0 || n > J.p) throw Error(Errc::invalid_argument, "wronskian: index out of range");
    const Matrix an = J.a_block(n);
    return theta[n].adjoint() * an * eta[n + 1] - theta[n + 1].adjoint() * an.adjoint() * eta[n];
}

/// Same pairing with eta replaced by its z-derivative.
inline Matrix wronskian_deriv(const BlockJacobiOperator& J, const SolutionEval& theta, const SolutionEval& eta,
                              Index n) {
    if (!eta.has_derivs()) throw Error(Errc::invalid_argument, "wronskian_deriv: derivatives not evaluated");
    const Matrix an = J.a_block(n);
    return theta[n].adjoint() * an * eta.deriv(n + 1) - theta[n + 1].adjoint() * an.adjoint() * eta.deriv(n);
}

/// n-th M-function, -chi_n(z) [a_{n-1}* chi_{n-1}(z)]^{-1} for n in 1..p+1.
/// Level 1 is the Weyl-Titchmarsh function; level p+1 vanishes.
inline Matrix m_level(const BlockJacobiOperator& J, Complex z, Index n, const Tolerances& tol = default_tolerances) {
    if (n < 1 || n > J.p + 1) throw Error(Errc::invalid_argument, "m_level: level out of range 1..p+1");
    if (n == J.p + 1) return Matrix::Zero(J.m, J.m);
    const SolutionEval chi = eval_chi(J, z, false, tol);
    const Matrix denom = J.a_block(n - 1).adjoint() * chi[n - 1];
    // X denom = -chi_n, solved through denom* X* = -chi_n*
    Eigen::PartialPivLU<Matrix> lu(denom.adjoint());
    if (!(lu.rcond() > tol.sing))
        throw Error(Errc::at_eigenvalue, "m_level: a_{n-1}* chi_{n-1}(z) is singular at this z");
    return -lu.solve(chi[n].adjoint()).adjoint();
}

/// Weyl-Titchmarsh function M(z) = -chi_1(z) chi_0(z)^{-1}.
inline Matrix weyl_m(const BlockJacobiOperator& J, Complex z, const Tolerances& tol = default_tolerances) {
    return m_level(J, z, 1, tol);
}

}  // namespace blockjac

#endif  // BLOCKJAC_OPERATOR_HPP
