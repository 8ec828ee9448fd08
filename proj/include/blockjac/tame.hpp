#ifndef BLOCKJAC_TAME_HPP
#define BLOCKJAC_TAME_HPP

// p-tameness of a system {(lambda_j, P_j)} and validation of spectral data.
//
// A system is p-tame when the block Hankel matrix of the moments
// T_s = sum_j lambda_j^s P_j, s = 0..2p-2, is positive definite;
// equivalently, when no nonzero C^m-valued polynomial F with deg F <= p-1
// satisfies P_j F(lambda_j) = 0 for every j.

#include <optional>
#include <string>
#include <vector>

#include "spectral.hpp"

namespace blockjac {

struct TamePoint {
    double lambda = 0.0;
    Matrix P;
};

struct TameSystem {
    Index m = 0;
    std::vector<TamePoint> points;
};

inline TameSystem tame_system(const SpectralData& data) {
    TameSystem sys{data.m, {}};
    for (const auto& pt : data.points) sys.points.push_back({pt.lambda, pt.P});
    return sys;
}

/// Raw block Hankel matrix (T_{s+k})_{s,k=0}^{p-1}.
inline Matrix hankel_block(const TameSystem& sys, Index p) {
    const Index m = sys.m;
    std::vector<Matrix> T(static_cast<std::size_t>(2 * p - 1), Matrix::Zero(m, m));
    for (const auto& pt : sys.points) {
        double power = 1.0;
        for (auto& Ts : T) {
            Ts += power * pt.P;
            power *= pt.lambda;
        }
    }
    Matrix H(m * p, m * p);
    for (Index s = 0; s < p; ++s)
        for (Index k = 0; k < p; ++k) H.block(s * m, k * m, m, m) = T[static_cast<std::size_t>(s + k)];
    return H;
}

namespace detail {

/// Affine map x = (lambda - center) / half_width onto [-1, 1].
struct AffineScale {
    double center = 0.0;
    double half_width = 1.0;

    double operator()(double lambda) const { return (lambda - center) / half_width; }
};

inline AffineScale affine_scale(const TameSystem& sys) {
    if (sys.points.empty()) return {};
    double lo = sys.points.front().lambda;
    double hi = lo;
    for (const auto& pt : sys.points) {
        lo = std::min(lo, pt.lambda);
        hi = std::max(hi, pt.lambda);
    }
    const double half = 0.5 * (hi - lo);
    return {0.5 * (hi + lo), half > 0.0 ? half : 1.0};
}

/// T_0(x)..T_{p-1}(x), Chebyshev polynomials of the first kind.
inline std::vector<double> chebyshev_values(double x, Index p) {
    std::vector<double> t(static_cast<std::size_t>(p));
    if (p > 0) t[0] = 1.0;
    if (p > 1) t[1] = x;
    for (Index k = 2; k < p; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        t[uk] = 2.0 * x * t[uk - 1] - t[uk - 2];
    }
    return t;
}

/// Row blocks P_j [T_0(x_j) I, ..., T_{p-1}(x_j) I] in the rescaled
/// Chebyshev basis. A change of polynomial basis of degree <= p-1 maps
/// obstructions bijectively, so tameness is unaffected, while the Gram
/// matrix stays far better conditioned than the raw Hankel matrix.
inline Matrix stacked_evaluation(const TameSystem& sys, Index p, const AffineScale& scale) {
    const Index m = sys.m;
    Matrix S(m * static_cast<Index>(sys.points.size()), m * p);
    for (std::size_t j = 0; j < sys.points.size(); ++j) {
        const auto t = chebyshev_values(scale(sys.points[j].lambda), p);
        for (Index k = 0; k < p; ++k)
            S.block(static_cast<Index>(j) * m, k * m, m, m) = t[static_cast<std::size_t>(k)] * sys.points[j].P;
    }
    return S;
}

/// Monomial coefficients (in lambda) of T_k((lambda - c)/h), k = 0..p-1.
inline std::vector<std::vector<double>> chebyshev_to_monomial(Index p, const AffineScale& scale) {
    const std::vector<double> x = {-scale.center / scale.half_width, 1.0 / scale.half_width};
    auto mul_x = [&](const std::vector<double>& a) {
        std::vector<double> r(a.size() + 1, 0.0);
        for (std::size_t i = 0; i < a.size(); ++i) {
            r[i] += a[i] * x[0];
            r[i + 1] += a[i] * x[1];
        }
        return r;
    };
    std::vector<std::vector<double>> T;
    if (p > 0) T.push_back({1.0});
    if (p > 1) T.push_back(x);
    for (Index k = 2; k < p; ++k) {
        auto next = mul_x(T.back());
        for (auto& c : next) c *= 2.0;
        const auto& prev = T[static_cast<std::size_t>(k - 2)];
        for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
        T.push_back(std::move(next));
    }
    return T;
}

}  // namespace detail

struct TameResult {
    bool applicable = false;  // sum of ranks equals m p
    bool tame = false;
    double defect = 0.0;      // min eigenvalue of the rescaled moment Gram matrix
    double threshold = 0.0;   // (tame * sigma_max)^2
    Index rank_sum = 0;
};

inline Index projector_rank(const Matrix& P, const Tolerances& tol) {
    return numerical_rank(P, tol.rank);
}

namespace detail {

/// Smallest and largest singular value of the stacked evaluation matrix;
/// zero smallest value when it has fewer rows than columns.
inline std::pair<double, double> stacked_extremes(const Matrix& S) {
    if (S.size() == 0) return {0.0, 0.0};
    const RealVector s = singular_values(S);
    const double smin = S.rows() < S.cols() ? 0.0 : s(s.size() - 1);
    return {smin, s(0)};
}

}  // namespace detail

/// Decides p-tameness. The moment Gram matrix in the rescaled Chebyshev
/// basis equals S* S for the stacked evaluation matrix S, so its extreme
/// eigenvalues are taken as squared singular values of S, which keeps the
/// decision accurate far below the double-precision floor of a direct
/// eigenvalue computation. Tame iff sigma_min(S) > tame * sigma_max(S).
inline TameResult is_p_tame(const TameSystem& sys, Index p, const Tolerances& tol = default_tolerances) {
    TameResult r;
    for (const auto& pt : sys.points) r.rank_sum += projector_rank(pt.P, tol);
    r.applicable = r.rank_sum == sys.m * p;
    const Matrix S = detail::stacked_evaluation(sys, p, detail::affine_scale(sys));
    const auto [smin, smax] = detail::stacked_extremes(S);
    r.defect = smin * smin;
    r.threshold = (tol.tame * smax) * (tol.tame * smax);
    r.tame = r.applicable && smax > 0.0 && smin > tol.tame * smax;
    return r;
}

/// A nonzero F(z) = sum_s v_s z^s with deg F <= p-1 and P_j F(lambda_j) = 0
/// for all j, returned as coefficients v_0..v_{p-1}, or nothing when the
/// evaluation matrix has full column rank.
inline std::optional<std::vector<Vector>> polynomial_obstruction(const TameSystem& sys, Index p,
                                                                 const Tolerances& tol = default_tolerances) {
    const Index m = sys.m;
    const Index cols = m * p;
    const auto scale = detail::affine_scale(sys);
    const Matrix S = detail::stacked_evaluation(sys, p, scale);
    Vector w;
    if (S.rows() < cols) {
        w = kernel_basis(S, 0.0).basis.col(0);
    } else {
        Eigen::JacobiSVD<Matrix> svd(S, Eigen::ComputeFullV);
        const RealVector& s = svd.singularValues();
        const double smin = s(s.size() - 1);
        if (s(0) > 0.0 && smin > tol.tame * s(0)) return std::nullopt;
        w = svd.matrixV().col(cols - 1);
    }
    const auto mono = detail::chebyshev_to_monomial(p, scale);
    std::vector<Vector> v(static_cast<std::size_t>(p), Vector::Zero(m));
    for (Index k = 0; k < p; ++k) {
        const auto& coeffs = mono[static_cast<std::size_t>(k)];
        for (std::size_t s = 0; s < coeffs.size(); ++s) v[s] += coeffs[s] * w.segment(k * m, m);
    }
    return v;
}

/// F(z) for coefficients v_0..v_{p-1}.
inline Vector eval_vector_polynomial(const std::vector<Vector>& v, Complex z) {
    Vector out = Vector::Zero(v.empty() ? 0 : v.front().size());
    for (auto it = v.rbegin(); it != v.rend(); ++it) out = (z * out + *it).eval();
    return out;
}

struct Check {
    std::string name;
    bool passed = false;
    double defect = 0.0;
    std::string detail;
};

struct ValidationReport {
    bool ok = false;
    std::vector<Check> checks;

    const Check* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
    bool passed(const std::string& name) const {
        const Check* c = find(name);
        return c && c->passed;
    }
};

namespace check_names {
inline constexpr const char* count = "point_count";
inline constexpr const char* ordering = "strict_ordering";
inline constexpr const char* projectors = "projectors";
inline constexpr const char* rank_sum = "rank_sum";
inline constexpr const char* tame = "p_tame";
inline constexpr const char* weights = "weights_positive";
inline constexpr const char* normalization = "residue_normalization";
}  // namespace check_names

/// Runs every admissibility condition on spectral data and records its measured defect.
inline ValidationReport validate_sp(const SpectralData& data, const Tolerances& tol = default_tolerances) {
    ValidationReport rep;
    const Index m = data.m;
    const Index p = data.p;
    const Index N = data.size();
    auto add = [&](const char* name, bool passed, double defect, std::string detail) {
        rep.checks.push_back({name, passed, defect, std::move(detail)});
    };

    add(check_names::count, m >= 1 && p >= 1 && p <= N && N <= p * m, static_cast<double>(N),
        "N = " + std::to_string(N) + ", need " + std::to_string(p) + " <= N <= " + std::to_string(p * m));

    {
        double radius = 0.0;
        for (const auto& pt : data.points) radius = std::max(radius, std::abs(pt.lambda));
        const double gap = cluster_gap(radius, tol);
        double min_gap = std::numeric_limits<double>::infinity();
        bool finite = true;
        for (Index j = 0; j < N; ++j) {
            finite = finite && std::isfinite(data.points[static_cast<std::size_t>(j)].lambda);
            if (j > 0)
                min_gap = std::min(min_gap, data.points[static_cast<std::size_t>(j)].lambda -
                                                data.points[static_cast<std::size_t>(j - 1)].lambda);
        }
        add(check_names::ordering, finite && !(min_gap <= gap), N > 1 ? min_gap : 0.0,
            "smallest consecutive gap vs required " + std::to_string(gap));
    }

    bool shapes_ok = true;
    {
        double worst = 0.0;
        std::string detail = "max of ||P - P*||, ||P^2 - P||";
        bool passed = true;
        for (Index j = 0; j < N; ++j) {
            const auto& pt = data.points[static_cast<std::size_t>(j)];
            if (pt.P.rows() != m || pt.P.cols() != m || pt.g.rows() != m || pt.g.cols() != m || !all_finite(pt.P) ||
                !all_finite(pt.g)) {
                shapes_ok = false;
                passed = false;
                detail = "point " + std::to_string(j) + " has malformed P or g";
                worst = std::numeric_limits<double>::infinity();
                continue;
            }
            const double d =
                std::max((pt.P - pt.P.adjoint()).norm(), (pt.P * pt.P - pt.P).norm()) / (1.0 + pt.P.norm());
            worst = std::max(worst, d);
            const Index rank = projector_rank(pt.P, tol);
            if (d > tol.herm) passed = false;
            if (rank < 1 || rank > m || rank != pt.multiplicity) {
                passed = false;
                detail = "point " + std::to_string(j) + ": rank " + std::to_string(rank) + ", multiplicity " +
                         std::to_string(pt.multiplicity);
            }
        }
        add(check_names::projectors, passed, worst, detail);
    }

    Index rank_sum = 0;
    if (shapes_ok)
        for (const auto& pt : data.points) rank_sum += projector_rank(pt.P, tol);
    add(check_names::rank_sum, shapes_ok && rank_sum == m * p, static_cast<double>(rank_sum),
        "sum rank P_j = " + std::to_string(rank_sum) + ", need " + std::to_string(m * p));

    if (shapes_ok && p >= 1) {
        const TameResult t = is_p_tame(tame_system(data), p, tol);
        add(check_names::tame, t.tame, t.defect,
            t.applicable ? "min eigenvalue of moment Gram vs " + std::to_string(t.threshold)
                         : std::string("precondition failed: sum of ranks != m p"));
    } else {
        add(check_names::tame, false, 0.0, "not evaluated: malformed points");
    }

    {
        bool passed = shapes_ok;
        double worst = std::numeric_limits<double>::infinity();
        std::string detail = "min over j of lambda_min(g_j on Ran P_j) / ||g_j||";
        for (Index j = 0; shapes_ok && j < N; ++j) {
            const auto& pt = data.points[static_cast<std::size_t>(j)];
            const double gnorm = pt.g.norm();
            const double herm = hermitian_defect(pt.g);
            const double support = (pt.g - pt.P * pt.g * pt.P).norm() / (1.0 + gnorm);
            const Subspace range = projector_range(pt.P);
            const Matrix gr = range.basis.adjoint() * pt.g * range.basis;
            const double lo = gr.size() ? min_eigenvalue(gr) : 0.0;
            const double rel = gnorm > 0.0 ? lo / gnorm : 0.0;
            worst = std::min(worst, rel);
            if (herm > tol.herm || support > tol.herm || !(lo > tol.pd * gnorm) || gnorm == 0.0) {
                passed = false;
                detail = "point " + std::to_string(j) + ": hermitian defect " + std::to_string(herm) +
                         ", support defect " + std::to_string(support) + ", min eigenvalue " + std::to_string(lo);
            }
        }
        add(check_names::weights, passed, N ? worst : 0.0, detail);
    }

    if (shapes_ok) {
        try {
            const Matrix sum = residue_sum(residues(data, tol));
            const double d = (sum - Matrix::Identity(m, m)).norm();
            add(check_names::normalization, d <= tol.sum, d, "||sum_j P_j g_j^{-1} P_j - I||_F");
        } catch (const Error& e) {
            add(check_names::normalization, false, std::numeric_limits<double>::infinity(), e.what());
        }
    } else {
        add(check_names::normalization, false, std::numeric_limits<double>::infinity(), "not evaluated");
    }

    rep.ok = true;
    for (const auto& c : rep.checks) rep.ok = rep.ok && c.passed;
    return rep;
}

}  // namespace blockjac

#endif  // BLOCKJAC_TAME_HPP
