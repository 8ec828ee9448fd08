#ifndef BLOCKJAC_RANDOM_HPP
#define BLOCKJAC_RANDOM_HPP

#include <cstdint>
#include <random>

#include "spectral.hpp"

namespace blockjac {

/// m x m matrix of i.i.d. standard complex normals, E|x|^2 = 1.
template <class Rng>
Matrix complex_normal(Rng& rng, Index rows, Index cols) {
    std::normal_distribution<double> nd(0.0, 1.0);
    const double s = 1.0 / std::sqrt(2.0);
    Matrix x(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) {
            const double re = nd(rng);
            const double im = nd(rng);
            x(i, j) = Complex(s * re, s * im);
        }
    return x;
}

/// Seeded sample of the class S+^{p-1} x S^p (or L+^{p-1} x S^p):
/// b_n = (X + X*)/2 and a_n a factor of Y Y* + 0.1 I.
inline BlockJacobiOperator gen_operator(Index m, Index p, Flavor flavor, std::uint64_t seed) {
    if (m < 1 || p < 1) throw Error(Errc::invalid_argument, "gen_operator: m and p must be positive");
    if (flavor == Flavor::general) throw Error(Errc::invalid_argument, "gen_operator: flavor must be splus or lplus");
    constexpr double eps = 0.1;
    std::mt19937_64 rng(seed);
    BlockJacobiOperator J;
    J.m = m;
    J.p = p;
    J.flavor = flavor;
    for (Index n = 0; n < p; ++n) {
        const Matrix x = complex_normal(rng, m, m);
        J.b.push_back(hermitian_part(x));
    }
    for (Index n = 0; n + 1 < p; ++n) {
        const Matrix y = complex_normal(rng, m, m);
        const Matrix gram = hermitian_part(y * y.adjoint()) + eps * Matrix::Identity(m, m);
        J.a.push_back(flavor == Flavor::splus ? hpd_sqrt(gram) : cholesky_lplus(gram));
    }
    return J;
}

/// Spectral data of a seeded S+ operator; always admissible.
inline SpectralData gen_spectral(Index m, Index p, std::uint64_t seed,
                                 const Tolerances& tol = default_tolerances) {
    return forward_map(gen_operator(m, p, Flavor::splus, seed), tol);
}

}  // namespace blockjac

#endif  // BLOCKJAC_RANDOM_HPP
