#ifndef BLOCKJAC_MATRIX_HPP
#define BLOCKJAC_MATRIX_HPP

// Dense complex kernels: Hermitian checks, the two factorizations used by
// the reconstruction (HPD square root and the lower-triangular L+ factor),
// and numerical kernel/range extraction.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "config.hpp"
#include "errors.hpp"

namespace blockjac {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Orthonormal basis of a subspace of C^n, stored as an n x k matrix.
struct Subspace {
    Matrix basis;

    Index ambient_dim() const { return basis.rows(); }
    Index dim() const { return basis.cols(); }
};

inline bool all_finite(const Matrix& a) {
    return a.allFinite();
}

/// ||M - M*||_F / (1 + ||M||_F). Non-square matrices report +inf.
inline double hermitian_defect(const Matrix& a) {
    if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
    return (a - a.adjoint()).norm() / (1.0 + a.norm());
}

inline bool is_hermitian(const Matrix& a, const Tolerances& tol = default_tolerances) {
    return all_finite(a) && hermitian_defect(a) <= tol.herm;
}

inline Matrix hermitian_part(const Matrix& a) {
    return 0.5 * (a + a.adjoint());
}

/// Largest violation of the L+ shape: strictly-upper moduli, diagonal
/// imaginary parts and non-positive diagonal real parts.
inline double lower_triangular_positive_defect(const Matrix& a) {
    if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
    double defect = 0.0;
    for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = 0; i < j; ++i) defect = std::max(defect, std::abs(a(i, j)));
        defect = std::max(defect, std::abs(a(j, j).imag()));
        if (!(a(j, j).real() > 0.0)) defect = std::max(defect, 1.0 - a(j, j).real());
    }
    return defect;
}

inline bool is_lower_triangular_positive(const Matrix& a, const Tolerances& tol = default_tolerances) {
    if (a.rows() != a.cols() || !all_finite(a)) return false;
    for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = 0; i < j; ++i)
            if (std::abs(a(i, j)) > tol.zero) return false;
        if (!(a(j, j).real() > 0.0) || std::abs(a(j, j).imag()) > tol.zero) return false;
    }
    return true;
}

/// Eigenvalues (ascending) of the Hermitian part of `a`.
inline RealVector hermitian_eigenvalues(const Matrix& a) {
    if (a.size() == 0) return RealVector(0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

inline double min_eigenvalue(const Matrix& a) {
    const RealVector ev = hermitian_eigenvalues(a);
    return ev.size() ? ev.minCoeff() : std::numeric_limits<double>::infinity();
}

inline double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

inline RealVector singular_values(const Matrix& a) {
    if (a.size() == 0) return RealVector(0);
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues();
}

namespace detail {

inline void require_hpd(const Matrix& a, const Tolerances& tol, const char* who) {
    if (a.rows() != a.cols())
        throw Error(Errc::invalid_argument, std::string(who) + ": matrix is not square");
    if (!is_hermitian(a, tol))
        throw Error(Errc::invalid_argument,
                    std::string(who) + ": matrix is not Hermitian (defect " +
                        std::to_string(hermitian_defect(a)) + ")");
    const RealVector ev = hermitian_eigenvalues(a);
    const double norm2 = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
    if (ev.size() == 0 || !(ev.minCoeff() > tol.pd * norm2) || norm2 == 0.0)
        throw Error(Errc::not_positive_definite,
                    std::string(who) + ": min eigenvalue " +
                        std::to_string(ev.size() ? ev.minCoeff() : 0.0) + " is not above " +
                        std::to_string(tol.pd * norm2));
}

}  // namespace detail

/// The unique a in L+ with a a* = A.
///
/// Writing A = [[B, C*], [C, D]] with B a positive scalar, the factor is
/// a = [[b, 0], [c, d]] where b^2 = B, c b = C and d d* = D - C C*/B; the
/// Schur complement is again positive definite and the step repeats on it.
inline Matrix cholesky_lplus(const Matrix& A, const Tolerances& tol = default_tolerances) {
    detail::require_hpd(A, tol, "cholesky_lplus");
    const Index m = A.rows();
    Matrix work = hermitian_part(A);
    Matrix a = Matrix::Zero(m, m);
    for (Index k = 0; k < m; ++k) {
        const double pivot = work(k, k).real();
        if (!(pivot > 0.0))
            throw Error(Errc::not_positive_definite,
                        "cholesky_lplus: non-positive pivot at step " + std::to_string(k));
        const double b = std::sqrt(pivot);
        a(k, k) = b;
        const Index rest = m - k - 1;
        if (rest == 0) break;
        const Vector C = work.block(k + 1, k, rest, 1);
        a.block(k + 1, k, rest, 1) = C / b;
        work.block(k + 1, k + 1, rest, rest) -= (C * C.adjoint()) / pivot;
    }
    return a;
}

/// Unique Hermitian positive definite square root.
inline Matrix hpd_sqrt(const Matrix& A, const Tolerances& tol = default_tolerances) {
    detail::require_hpd(A, tol, "hpd_sqrt");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(A));
    const RealVector roots = es.eigenvalues().cwiseSqrt();
    const Matrix& V = es.eigenvectors();
    return hermitian_part(V * roots.cast<Complex>().asDiagonal() * V.adjoint());
}

/// Orthonormal basis of the numerical kernel: right singular vectors whose
/// singular value is at most rel_tol * max(sigma_max, reference). Pass a
/// reference magnitude when M may be entirely small (e.g. 1 x 1 at a root).
/// A zero matrix has the full space as kernel.
inline Subspace kernel_basis(const Matrix& M, double rel_tol, double reference = 0.0) {
    const Index n = M.cols();
    if (n == 0) return {Matrix(0, 0)};
    if (M.rows() == 0) return {Matrix::Identity(n, n)};
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
    const RealVector& s = svd.singularValues();
    const double smax = std::max(s.size() ? s(0) : 0.0, reference);
    Index rank = 0;
    if (smax > 0.0)
        for (Index i = 0; i < s.size(); ++i)
            if (s(i) > rel_tol * smax) ++rank;
    return {svd.matrixV().rightCols(n - rank)};
}

inline Subspace kernel_basis(const Matrix& M, const Tolerances& tol = default_tolerances) {
    return kernel_basis(M, tol.rank);
}

/// Orthonormal basis of the numerical range (left singular vectors).
inline Subspace range_basis(const Matrix& M, double rel_tol) {
    if (M.size() == 0) return {Matrix(M.rows(), 0)};
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU);
    const RealVector& s = svd.singularValues();
    const double smax = s(0);
    Index rank = 0;
    if (smax > 0.0)
        for (Index i = 0; i < s.size(); ++i)
            if (s(i) > rel_tol * smax) ++rank;
    return {svd.matrixU().leftCols(rank)};
}

inline Index numerical_rank(const Matrix& M, double rel_tol) {
    if (M.size() == 0) return 0;
    const RealVector s = singular_values(M);
    Index rank = 0;
    if (s(0) > 0.0)
        for (Index i = 0; i < s.size(); ++i)
            if (s(i) > rel_tol * s(0)) ++rank;
    return rank;
}

/// Orthogonal projector onto the subspace.
inline Matrix projector(const Subspace& s) {
    return s.basis * s.basis.adjoint();
}

/// Basis of Ran P for a Hermitian (near-)projector: eigenvectors with
/// eigenvalue above 1/2.
inline Subspace projector_range(const Matrix& P) {
    if (P.size() == 0) return {Matrix(P.rows(), 0)};
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(P));
    const RealVector& ev = es.eigenvalues();
    Index first = 0;
    while (first < ev.size() && ev(first) <= 0.5) ++first;
    return {es.eigenvectors().rightCols(ev.size() - first)};
}

}  // namespace blockjac

#endif  // BLOCKJAC_MATRIX_HPP
