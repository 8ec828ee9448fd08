#ifndef BLOCKJAC_SPECTRAL_HPP
#define BLOCKJAC_SPECTRAL_HPP

// Forward spectral map J -> (lambda_j, P_j, g_j) and the residue calculus
// linking the spectral data to the Weyl-Titchmarsh function.

#include <optional>
#include <string>
#include <vector>

#include "operator.hpp"

namespace blockjac {

/// One eigenvalue with its kernel projector and weight.
///
/// `g` is the m x m zero extension P g P of the weight operator on Ran P.
struct SpectralPoint {
    double lambda = 0.0;
    Matrix P;
    Matrix g;
    Index multiplicity = 0;
};

struct SpectralData {
    Index m = 0;
    Index p = 0;
    std::vector<SpectralPoint> points;  // strictly increasing lambda

    Index size() const { return static_cast<Index>(points.size()); }
};

struct Pole {
    double mu = 0.0;
    Matrix residue;  // positive semidefinite
};

/// f(z) = linear z + constant - sum_s residue_s / (z - mu_s).
struct PoleResidueFunction {
    Index m = 0;
    std::optional<Matrix> linear;
    std::optional<Matrix> constant;
    std::vector<Pole> poles;
};

inline double cluster_gap(double spectral_radius, const Tolerances& tol) {
    return tol.cluster * (1.0 + spectral_radius);
}

/// Sorted eigenvalue clusters: (mean value, size).
inline std::vector<std::pair<double, Index>> cluster_eigenvalues(const RealVector& sorted, const Tolerances& tol) {
    std::vector<std::pair<double, Index>> clusters;
    if (sorted.size() == 0) return clusters;
    const double gap = cluster_gap(sorted.cwiseAbs().maxCoeff(), tol);
    Index start = 0;
    for (Index i = 1; i <= sorted.size(); ++i) {
        if (i == sorted.size() || sorted(i) - sorted(i - 1) > gap) {
            const Index count = i - start;
            clusters.emplace_back(sorted.segment(start, count).mean(), count);
            start = i;
        }
    }
    return clusters;
}

/// B = P (g restricted to Ran P)^{-1} P. Throws SingularWeight when the
/// restriction is not invertible.
inline Matrix restricted_inverse(const Matrix& P, const Matrix& g, const Tolerances& tol = default_tolerances) {
    const Subspace range = projector_range(P);
    const Matrix& U = range.basis;
    if (U.cols() == 0) return Matrix::Zero(P.rows(), P.cols());
    const Matrix gr = hermitian_part(U.adjoint() * g * U);
    const RealVector s = singular_values(gr);
    if (!(s(s.size() - 1) > tol.sing * s(0)))
        throw Error(Errc::singular_weight, "weight restricted to Ran P is numerically singular");
    return hermitian_part(U * gr.inverse() * U.adjoint());
}

/// Sum_{n=1}^p phi_n*(conj z) phi_n(z).
inline Matrix phi_gram(const SolutionEval& phi, Index p) {
    Matrix G = Matrix::Zero(phi[1].rows(), phi[1].cols());
    for (Index n = 1; n <= p; ++n) G += phi[n].adjoint() * phi[n];
    return G;
}

/// The forward map J -> (lambda_j, P_j, g_j).
///
/// Eigenvalues come from the dense Hermitian eigensolver and are grouped
/// into clusters. Every eigenvector has the form psi_n = phi_n(lambda_j) v,
/// so the first block rows U_j (m x k_j) of an orthonormal eigenbasis of a
/// cluster span E_j = Ker phi_{p+1}(lambda_j), and U_j U_j* is the residue
/// B_j = P_j g_j^{-1} P_j. The weight is recovered as the inverse of B_j on
/// Ran P_j.
inline SpectralData forward_map(const BlockJacobiOperator& J, const Tolerances& tol = default_tolerances) {
    validate_operator(J, tol);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(assemble_dense(J)));
    const auto clusters = cluster_eigenvalues(es.eigenvalues(), tol);

    SpectralData out{J.m, J.p, {}};
    out.points.reserve(clusters.size());
    Index start = 0;
    for (const auto& [lambda, count] : clusters) {
        const Matrix U = es.eigenvectors().block(0, start, J.m, count);
        start += count;
        const Subspace E = range_basis(U, tol.rank);
        if (E.dim() != count)
            throw Error(Errc::multiplicity_mismatch,
                        "eigenvalue " + std::to_string(lambda) + ": cluster size " + std::to_string(count) +
                            " but kernel dimension " + std::to_string(E.dim()));
        const Matrix& Q = E.basis;
        const Matrix Br = hermitian_part(Q.adjoint() * U * U.adjoint() * Q);
        SpectralPoint pt;
        pt.lambda = lambda;
        pt.multiplicity = count;
        pt.P = projector(E);
        pt.g = Q * hermitian_part(Br.inverse()) * Q.adjoint();
        out.points.push_back(std::move(pt));
    }
    return out;
}

/// Size that rounding errors in phi_{p+1} scale with: (1 + ||J||) max_n ||phi_n||,
/// with ||J|| bounded blockwise.
inline double phi_scale(const BlockJacobiOperator& J, const SolutionEval& phi) {
    double jnorm = 0.0;
    for (Index n = 1; n <= J.p; ++n)
        jnorm = std::max(jnorm, J.b_block(n).norm() + J.a_block(n).norm() + J.a_block(n - 1).norm());
    double big = 0.0;
    for (const auto& v : phi.values) big = std::max(big, v.norm());
    return (1.0 + jnorm + std::abs(phi.z)) * big;
}

/// Spectral point computed from the fundamental solution alone:
/// E = Ker phi_{p+1}(lambda) and g = P (sum_n phi_n* phi_n) P. Accurate
/// only while phi_{p+1} is well scaled (moderate p); used as a cross-check
/// of forward_map.
inline SpectralPoint spectral_point_from_phi(const BlockJacobiOperator& J, double lambda,
                                             const Tolerances& tol = default_tolerances) {
    const SolutionEval phi = eval_phi(J, Complex(lambda, 0.0), false, tol);
    const Subspace kernel = kernel_basis(phi[J.p + 1], tol.rank, phi_scale(J, phi));
    const Matrix& U = kernel.basis;
    SpectralPoint pt;
    pt.lambda = lambda;
    pt.multiplicity = kernel.dim();
    pt.P = projector(kernel);
    pt.g = U * hermitian_part(U.adjoint() * phi_gram(phi, J.p) * U) * U.adjoint();
    return pt;
}

/// Pole/residue form of M: residues B_j = P_j g_j^{-1} P_j, no polynomial part.
inline PoleResidueFunction residues(const SpectralData& data, const Tolerances& tol = default_tolerances) {
    PoleResidueFunction f;
    f.m = data.m;
    f.poles.reserve(data.points.size());
    for (const auto& pt : data.points) f.poles.push_back({pt.lambda, restricted_inverse(pt.P, pt.g, tol)});
    return f;
}

inline Matrix residue_sum(const PoleResidueFunction& f) {
    Matrix s = Matrix::Zero(f.m, f.m);
    for (const auto& pole : f.poles) s += pole.residue;
    return s;
}

inline Matrix eval_prf(const PoleResidueFunction& f, Complex z, const Tolerances& tol = default_tolerances) {
    Matrix out = Matrix::Zero(f.m, f.m);
    if (f.linear) out += z * *f.linear;
    if (f.constant) out += *f.constant;
    for (const auto& pole : f.poles) {
        const Complex d = z - pole.mu;
        if (std::abs(d) <= tol.pole_guard * (1.0 + std::abs(pole.mu)))
            throw Error(Errc::near_pole, "evaluation point within guard of pole " + std::to_string(pole.mu));
        out -= pole.residue / d;
    }
    return out;
}

/// Residue of phi_{p+1}(z)^{-1} at lambda_j: P_j Y_j^{-1} P_j#, with
/// Y_j = P_j# phi'_{p+1}(lambda_j) P_j mapping E_j onto E_j# = Ker phi_{p+1}*(lambda_j).
///
/// E_j# is taken as Ran phi_p(lambda_j) P_j, which lies in Ker phi_{p+1}* by
/// the Wronskian identity and has the same dimension because
/// chi_1 phi_p P_j = P_j.
inline Matrix phi_inverse_residue(const BlockJacobiOperator& J, const SpectralPoint& pt,
                                  const Tolerances& tol = default_tolerances) {
    const SolutionEval phi = eval_phi(J, Complex(pt.lambda, 0.0), true, tol);
    const Subspace E = projector_range(pt.P);
    const Subspace Esharp = range_basis(phi[J.p] * E.basis, tol.rank);
    if (Esharp.dim() != E.dim())
        throw Error(Errc::singular_y, "phi_p(lambda) is not injective on E_j at lambda " + std::to_string(pt.lambda));
    const Matrix Y = Esharp.basis.adjoint() * phi.deriv(J.p + 1) * E.basis;
    const RealVector s = singular_values(Y);
    if (s.size() == 0 || !(s(s.size() - 1) > tol.sing * s(0)))
        throw Error(Errc::singular_y, "Y_j is singular at lambda " + std::to_string(pt.lambda));
    return E.basis * Y.inverse() * Esharp.basis.adjoint();
}

}  // namespace blockjac

#endif  // BLOCKJAC_SPECTRAL_HPP
