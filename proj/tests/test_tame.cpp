#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace blockjac;
using blockjac::testkit::Rng;

namespace {

TameSystem identity_system(Index m, const std::vector<double>& lambdas) {
    TameSystem sys{m, {}};
    for (double l : lambdas) sys.points.push_back({l, Matrix::Identity(m, m)});
    return sys;
}

double max_annihilation_defect(const TameSystem& sys, const std::vector<Vector>& F) {
    double norm = 0.0;
    for (const auto& v : F) norm = std::max(norm, v.norm());
    double worst = 0.0;
    for (const auto& pt : sys.points)
        worst = std::max(worst, (pt.P * eval_vector_polynomial(F, Complex(pt.lambda, 0.0))).norm());
    return norm > 0.0 ? worst / norm : std::numeric_limits<double>::infinity();
}

bool has_kernel_intersection(const Matrix& P1, const Matrix& P2) {
    Matrix stacked(2 * P1.rows(), P1.cols());
    stacked << P1, P2;
    return kernel_basis(stacked, 1e-8).dim() > 0;
}

}  // namespace

TEST(is_p_tame, identity_projectors_are_tame) {
    for (Index m : {1, 2, 3})
        for (Index p : {1, 2, 3, 5}) {
            std::vector<double> l;
            for (Index j = 0; j < p; ++j) l.push_back(-1.0 + 0.7 * static_cast<double>(j));
            const TameSystem sys = identity_system(m, l);
            const TameResult r = is_p_tame(sys, p);
            EXPECT_TRUE(r.applicable);
            EXPECT_TRUE(r.tame) << "m " << m << " p " << p;
            EXPECT_FALSE(polynomial_obstruction(sys, p).has_value());
            // raw Hankel is the scalar moment Hankel tensored with I
            EXPECT_GT(min_eigenvalue(hankel_block(sys, p)), 0.0);
        }
}

TEST(is_p_tame, two_projectors_tame_iff_kernels_meet_trivially) {
    Rng rng(71);
    for (Index m : {2, 3, 4})
        for (Index k1 = 1; k1 < m; ++k1)
            for (bool shared : {false, true}) {
                const SpectralData d = testkit::two_kernel_data(rng, m, k1, shared);
                const TameSystem sys = tame_system(d);
                const bool expected = !has_kernel_intersection(d.points[0].P, d.points[1].P);
                EXPECT_EQ(expected, !shared);
                EXPECT_EQ(is_p_tame(sys, 2).tame, expected);
                EXPECT_EQ(!polynomial_obstruction(sys, 2).has_value(), expected);
            }
}

TEST(polynomial_obstruction, constant_vector_example) {
    // every P_j = diag(1, 0) kills F = (0, 1)
    TameSystem sys{2, {}};
    Matrix P = Matrix::Zero(2, 2);
    P(0, 0) = 1.0;
    for (double l : {-1.0, 0.0, 1.0, 2.0}) sys.points.push_back({l, P});
    const TameResult r = is_p_tame(sys, 2);
    EXPECT_TRUE(r.applicable);
    EXPECT_FALSE(r.tame);
    const auto F = polynomial_obstruction(sys, 2);
    ASSERT_TRUE(F.has_value());
    ASSERT_EQ(F->size(), 2u);
    EXPECT_LT(max_annihilation_defect(sys, *F), 1e-12);
    for (const auto& v : *F) EXPECT_LT(std::abs(v(0)), 1e-12);
}

TEST(polynomial_obstruction, planted_polynomial_is_found) {
    Rng rng(72);
    for (Index m : {2, 3, 4})
        for (Index p : {1, 2, 4, 8}) {
            const TameSystem sys = testkit::obstructed_system(rng, m, p, p - 1);
            EXPECT_FALSE(is_p_tame(sys, p).tame);
            const auto F = polynomial_obstruction(sys, p);
            ASSERT_TRUE(F.has_value());
            EXPECT_LT(max_annihilation_defect(sys, *F), 1e-8);
        }
}

TEST(tameness, equivalence_on_mixed_systems) {
    Rng rng(73);
    int agree = 0;
    int total = 0;
    for (int k = 0; k < 100; ++k) {
        const Index m = 1 + k % 4;
        const Index p = std::array<Index, 4>{1, 2, 4, 8}[static_cast<std::size_t>(k / 4 % 4)];
        const SpectralData d = gen_spectral(m, p, 5000 + static_cast<std::uint64_t>(k));
        const TameSystem sys = tame_system(d);
        const bool tame = is_p_tame(sys, p).tame;
        agree += tame == !polynomial_obstruction(sys, p).has_value() && tame;
        ++total;
    }
    for (int k = 0; k < 100; ++k) {
        const Index m = 2 + k % 3;
        const Index p = std::array<Index, 4>{1, 2, 4, 8}[static_cast<std::size_t>(k / 3 % 4)];
        const TameSystem sys = testkit::obstructed_system(rng, m, p, std::max<Index>(0, p - 1 - k % 2));
        const bool tame = is_p_tame(sys, p).tame;
        agree += tame == !polynomial_obstruction(sys, p).has_value() && !tame;
        ++total;
    }
    EXPECT_EQ(agree, total);
}

TEST(tameness, chebyshev_and_raw_hankel_agree_at_small_p) {
    Rng rng(74);
    for (int k = 0; k < 40; ++k) {
        const Index m = 2 + k % 2;
        const Index p = 1 + k % 3;
        const bool obstructed = k % 2 == 1;
        const TameSystem sys = obstructed ? testkit::obstructed_system(rng, m, p, p - 1)
                                          : tame_system(testkit::random_spectral_data(rng, m, p));
        const Matrix H = hankel_block(sys, p);
        const double ratio = min_eigenvalue(H) / spectral_norm(H);
        EXPECT_EQ(is_p_tame(sys, p).tame, ratio > 1e-9) << "ratio " << ratio;
    }
}

TEST(is_p_tame, not_applicable_when_ranks_do_not_sum) {
    const TameSystem sys = identity_system(2, {0.0, 1.0});
    const TameResult r = is_p_tame(sys, 3);
    EXPECT_FALSE(r.applicable);
    EXPECT_FALSE(r.tame);
}

TEST(validate_sp, generated_data_is_valid) {
    Rng rng(75);
    for (Index m : {1, 2, 3, 4})
        for (Index p : {1, 2, 4, 8}) {
            const ValidationReport rep = validate_sp(testkit::random_spectral_data(rng, m, p));
            EXPECT_TRUE(rep.ok) << "m " << m << " p " << p;
            EXPECT_EQ(rep.checks.size(), 7u);
        }
}

class Corruption : public ::testing::Test {
protected:
    Rng rng{76};
    SpectralData base = gen_spectral(2, 3, 42);

    void SetUp() override { ASSERT_TRUE(validate_sp(base).ok); }

    static void expect_flags(const SpectralData& d, const char* name) {
        const ValidationReport rep = validate_sp(d);
        EXPECT_FALSE(rep.ok);
        ASSERT_NE(rep.find(name), nullptr);
        EXPECT_FALSE(rep.passed(name)) << name;
    }
};

TEST_F(Corruption, point_count) {
    SpectralData d = testkit::two_kernel_data(rng, 2, 1, false);
    d.points.resize(1);
    expect_flags(d, check_names::count);
}

TEST_F(Corruption, strict_ordering_alone) {
    SpectralData d = base;
    std::swap(d.points[0], d.points[1]);
    const ValidationReport rep = validate_sp(d);
    for (const auto& c : rep.checks) EXPECT_EQ(c.passed, c.name != check_names::ordering) << c.name;

    SpectralData dup = base;
    dup.points[1].lambda = dup.points[0].lambda;
    expect_flags(dup, check_names::ordering);
}

TEST_F(Corruption, projectors) {
    SpectralData d = base;
    d.points[0].P += 1e-3 * testkit::random_hermitian(rng, 2);
    expect_flags(d, check_names::projectors);
    SpectralData n = base;
    n.points[0].multiplicity += 1;
    expect_flags(n, check_names::projectors);
}

TEST_F(Corruption, rank_sum) {
    SpectralData d = base;
    auto& pt = d.points[0];
    ASSERT_EQ(pt.multiplicity, 1);
    const Matrix comp = Matrix::Identity(2, 2) - pt.P;
    pt.P = Matrix::Identity(2, 2);
    pt.g += comp;
    pt.multiplicity = 2;
    const ValidationReport rep = validate_sp(d);
    EXPECT_FALSE(rep.passed(check_names::rank_sum));
    EXPECT_TRUE(rep.passed(check_names::projectors));
    EXPECT_TRUE(rep.passed(check_names::weights));
}

TEST_F(Corruption, p_tame_alone) {
    const ValidationReport rep = validate_sp(testkit::obstructed_spectral_data(rng, 2, 3, 2));
    for (const auto& c : rep.checks) EXPECT_EQ(c.passed, c.name != check_names::tame) << c.name;
}

TEST_F(Corruption, weights_positive) {
    SpectralData d = base;
    d.points[1].g = -d.points[1].g;
    expect_flags(d, check_names::weights);
    SpectralData h = base;
    const Matrix& P = h.points[1].P;
    h.points[1].g += Complex(0, 1e-3) * (P * testkit::random_complex(rng, 2, 2) * P);
    expect_flags(h, check_names::weights);
}

TEST_F(Corruption, residue_normalization_alone) {
    SpectralData d = base;
    d.points[2].g *= 2.0;
    const ValidationReport rep = validate_sp(d);
    for (const auto& c : rep.checks) EXPECT_EQ(c.passed, c.name != check_names::normalization) << c.name;
}
