#ifndef BLOCKJAC_CONFIG_HPP
#define BLOCKJAC_CONFIG_HPP

namespace blockjac {

/// Numerical thresholds shared by the whole pipeline.
///
/// One record is threaded explicitly through every call that makes a
/// numerical decision; there are no global tolerances. Relative thresholds
/// are scaled by the norm named next to each field.
struct Tolerances {
    double herm = 1e-10;     // ||M - M*||_F <= herm * (1 + ||M||_F)
    double ortho = 1e-10;    // ||U*U - I||_F for subspace bases
    double pd = 1e-12;       // min eigenvalue > pd * ||A||_2
    double fact = 1e-10;     // factorization residual, relative
    double rank = 1e-8;      // sigma_i <= rank * sigma_max counts as zero
    double cluster = 1e-7;   // eigenvalue gap, times (1 + spectral radius)
    double tame = 1e-10;     // min eig of moment Gram > tame * (1 + ||G||_2)
    double sum = 1e-8;       // ||sum_j B_j - I||_F in spectral data validation
    double sing = 1e-12;     // reciprocal condition of a_n
    double zero = 1e-12;     // entries treated as zero (triangularity, imag parts)
    double pole_guard = 1e-12;  // |z - mu| <= pole_guard * (1 + |mu|)
};

inline const Tolerances default_tolerances{};

}  // namespace blockjac

#endif  // BLOCKJAC_CONFIG_HPP
