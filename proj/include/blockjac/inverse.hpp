#ifndef BLOCKJAC_INVERSE_HPP
#define BLOCKJAC_INVERSE_HPP

// Reconstruction of (a, b) from spectral data, for either normalization
// of the off-diagonal blocks.
//
// The data define the discrete matrix measure sum_j B_j delta_{lambda_j}
// whose Stieltjes transform is M(z). Block Lanczos on the multiplication
// operator of that measure, started from the block W with W* W = sum B_j = I,
// produces exactly the recursion coefficients of the continued fraction
//   -M_n(z)^{-1} = z - b_n + a_n M_{n+1}(z) a_n*,
// with a_n fixed by factoring a_n a_n* as HPD square root or as the L+ factor.

#include <algorithm>
#include <string>
#include <vector>

#include "spectral.hpp"
#include "tame.hpp"

namespace blockjac {

/// Diagonal Lambda (lambda_j repeated k_j times) and the mp x m block W
/// whose j-th row block is W_j*, where W_j W_j* = B_j.
struct MeasureRepresentation {
    RealVector lambda;
    Matrix W;
};

inline MeasureRepresentation measure_representation(const SpectralData& data,
                                                     const Tolerances& tol = default_tolerances) {
    Index rows = 0;
    for (const auto& pt : data.points) rows += pt.multiplicity;
    MeasureRepresentation rep{RealVector(rows), Matrix(rows, data.m)};
    Index at = 0;
    for (const auto& pt : data.points) {
        const Subspace range = projector_range(pt.P);
        if (range.dim() != pt.multiplicity)
            throw Error(Errc::invalid_argument, "rank of P differs from multiplicity at lambda " +
                                                    std::to_string(pt.lambda));
        const Matrix& U = range.basis;
        const Matrix B = restricted_inverse(pt.P, pt.g, tol);
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(U.adjoint() * B * U));
        const Index k = range.dim();
        for (Index c = 0; c < k; ++c) {
            // descending eigenvalue order
            const Index src = k - 1 - c;
            const double ev = std::max(es.eigenvalues()(src), 0.0);
            Vector w = U * es.eigenvectors().col(src) * std::sqrt(ev);
            // sign fix: first non-negligible component real positive
            for (Index i = 0; i < w.size(); ++i) {
                if (std::abs(w(i)) > 1e-12 * w.norm()) {
                    w *= std::conj(w(i)) / std::abs(w(i));
                    break;
                }
            }
            rep.lambda(at) = pt.lambda;
            rep.W.row(at) = w.adjoint();
            ++at;
        }
    }
    return rep;
}

struct FirstMoments {
    Matrix b1;  // sum_j lambda_j B_j
    Matrix A;   // sum_j lambda_j^2 B_j - b1^2 = a_1 a_1*
};

/// b_1 and a_1 a_1* from the large-z expansion M(z) = -sum_s T'_s z^{-s-1},
/// T'_s = sum_j lambda_j^s B_j, T'_0 = I.
inline FirstMoments moment_extract(const SpectralData& data, const Tolerances& tol = default_tolerances) {
    const PoleResidueFunction f = residues(data, tol);
    Matrix T1 = Matrix::Zero(data.m, data.m);
    Matrix T2 = Matrix::Zero(data.m, data.m);
    for (const auto& pole : f.poles) {
        T1 += pole.mu * pole.residue;
        T2 += pole.mu * pole.mu * pole.residue;
    }
    FirstMoments out{hermitian_part(T1), Matrix()};
    out.A = hermitian_part(T2 - out.b1 * out.b1);
    if (data.p >= 2) {
        const RealVector ev = hermitian_eigenvalues(out.A);
        if (!(ev.minCoeff() > tol.pd * ev.cwiseAbs().maxCoeff()))
            throw Error(Errc::not_positive_definite,
                        "a_1 a_1* from the second moment is not positive definite (min eigenvalue " +
                            std::to_string(ev.minCoeff()) + ")");
    }
    return out;
}

/// The inverse spectral map. Requires admissible data (see validate_sp); data that is
/// not p-tame makes the residual block lose rank and raises LanczosBreakdown.
inline BlockJacobiOperator inverse_map(const SpectralData& data, Flavor flavor,
                                       const Tolerances& tol = default_tolerances) {
    if (flavor == Flavor::general) throw Error(Errc::invalid_argument, "inverse_map: flavor must be splus or lplus");
    const Index m = data.m;
    const Index p = data.p;
    const MeasureRepresentation rep = measure_representation(data, tol);
    const Index dim = rep.lambda.size();
    if (dim != m * p)
        throw Error(Errc::invalid_argument, "sum of multiplicities " + std::to_string(dim) + " differs from m p = " +
                                                std::to_string(m * p));
    const Eigen::DiagonalMatrix<Complex, Eigen::Dynamic> Lambda(rep.lambda.cast<Complex>());
    const double scale = 1.0 + (dim ? rep.lambda.cwiseAbs().maxCoeff() : 0.0);

    BlockJacobiOperator J;
    J.m = m;
    J.p = p;
    J.flavor = flavor;

    Matrix basis(dim, m * p);  // Q_1..Q_n as they are produced
    basis.leftCols(m) = rep.W;
    Matrix prev_a;
    for (Index n = 1; n <= p; ++n) {
        const Matrix Qn = basis.middleCols((n - 1) * m, m);
        const Matrix LQ = Lambda * Qn;
        J.b.push_back(hermitian_part(Qn.adjoint() * LQ));
        if (n == p) break;
        Matrix R = LQ - Qn * J.b.back();
        if (n > 1) R -= basis.middleCols((n - 2) * m, m) * prev_a;
        const auto done = basis.leftCols(n * m);
        for (int pass = 0; pass < 2; ++pass) R -= done * (done.adjoint() * R);

        const RealVector s = singular_values(R);
        const double smin = s(s.size() - 1);
        if (!(smin > tol.rank * scale))
            throw LanczosBreakdown(static_cast<int>(n), smin,
                                   "residual block at stage " + std::to_string(n) + " has rank deficiency (sigma_min " +
                                       std::to_string(smin) + "); data is not " + std::to_string(p) + "-tame");
        const Matrix gram = hermitian_part(R.adjoint() * R);
        const Matrix an = flavor == Flavor::splus ? hpd_sqrt(gram, tol) : cholesky_lplus(gram, tol);
        // Q_{n+1} = R (a_n*)^{-1}
        basis.middleCols(n * m, m) = an.adjoint().transpose().partialPivLu().solve(R.transpose()).transpose();
        J.a.push_back(an);
        prev_a = an;
    }
    return J;
}

struct HerglotzDecomposition {
    PoleResidueFunction function;  // -M^{-1}(z) = z I + C - sum_s D_s / (z - mu_s)
    std::vector<Index> ranks;      // rank D_s
    Index rank_total = 0;
    bool cancellation = false;     // some mu_s coincides with some lambda_j
};

/// Herglotz representation of -M^{-1}: C = -b_1, and the poles and residues
/// come from the Weyl function of the operator with its first block removed,
/// conjugated by a_1.
inline HerglotzDecomposition herglotz_decompose(const SpectralData& data, Flavor flavor,
                                                const Tolerances& tol = default_tolerances) {
    const BlockJacobiOperator J = inverse_map(data, flavor, tol);
    const Index m = data.m;
    HerglotzDecomposition out;
    out.function.m = m;
    out.function.linear = Matrix::Identity(m, m);
    out.function.constant = -J.b_block(1);
    if (J.p == 1) return out;

    BlockJacobiOperator tail;
    tail.m = m;
    tail.p = J.p - 1;
    tail.flavor = J.flavor;
    tail.b.assign(J.b.begin() + 1, J.b.end());
    tail.a.assign(J.a.begin() + 1, J.a.end());
    const PoleResidueFunction inner = residues(forward_map(tail, tol), tol);
    const Matrix& a1 = J.a.front();

    double radius = 0.0;
    for (const auto& pt : data.points) radius = std::max(radius, std::abs(pt.lambda));
    const double gap = cluster_gap(radius, tol);
    for (const auto& pole : inner.poles) {
        Matrix D = hermitian_part(a1 * pole.residue * a1.adjoint());
        const Index r = numerical_rank(D, tol.rank);
        out.ranks.push_back(r);
        out.rank_total += r;
        for (const auto& pt : data.points)
            if (std::abs(pt.lambda - pole.mu) < gap) out.cancellation = true;
        out.function.poles.push_back({pole.mu, std::move(D)});
    }
    return out;
}

}  // namespace blockjac

#endif  // BLOCKJAC_INVERSE_HPP
