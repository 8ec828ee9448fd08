#ifndef BLOCKJAC_TOOLS_CLI_HPP
#define BLOCKJAC_TOOLS_CLI_HPP

// Command-line front end. Exit codes: 0 success, 1 validation or numerical
// failure (report on stdout), 2 usage, I/O or schema errors.

#include <CLI11.hpp>

#include <blockjac/blockjac.hpp>

#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace blockjac::cli {

enum ExitCode : int { ok = 0, failed = 1, usage = 2 };

namespace detail {

inline Complex parse_complex(const std::string& text) {
    const auto comma = text.find(',');
    try {
        std::size_t used = 0;
        if (comma == std::string::npos) {
            const double re = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return {re, 0.0};
        }
        const std::string rs = text.substr(0, comma);
        const std::string is = text.substr(comma + 1);
        const double re = std::stod(rs, &used);
        if (used != rs.size()) throw std::invalid_argument(text);
        const double im = std::stod(is, &used);
        if (used != is.size()) throw std::invalid_argument(text);
        return {re, im};
    } catch (const std::logic_error&) {
        throw Error(Errc::invalid_argument, "cannot parse complex number '" + text + "' (expected re,im)");
    }
}

inline double max_block_deviation(const BlockJacobiOperator& x, const BlockJacobiOperator& y) {
    double worst = 0.0;
    for (std::size_t n = 0; n < x.b.size(); ++n)
        worst = std::max(worst, (x.b[n] - y.b[n]).norm() / std::max(x.b[n].norm(), 1e-300));
    for (std::size_t n = 0; n < x.a.size(); ++n)
        worst = std::max(worst, (x.a[n] - y.a[n]).norm() / std::max(x.a[n].norm(), 1e-300));
    return worst;
}

}  // namespace detail

/// Runs one CLI invocation; all output goes to `out` / `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Block Jacobi spectral toolkit: forward and inverse spectral maps"};
    app.require_subcommand(1);
    app.fallthrough();

    Tolerances tol;
    double check_tol = 1e-8;
    bool check_tol_set = false;
    app.add_option("--cluster-tol", tol.cluster, "relative eigenvalue clustering gap")->capture_default_str();
    app.add_option("--rank-tol", tol.rank, "relative singular-value threshold for ranks")->capture_default_str();
    app.add_option_function<double>(
           "--tol",
           [&](double v) {
               check_tol = v;
               check_tol_set = true;
           },
           "acceptance tolerance (roundtrip deviation, residue normalization)")
        ->default_str("1e-8");

    std::string in_path;
    std::string out_path;
    std::string op_path;
    std::string spec_out;
    std::string flavor_text = "splus";
    std::string z_text;
    Index p_arg = 0;
    Index m_arg = 0;
    Index level = 1;
    std::uint64_t seed = 0;

    auto* forward = app.add_subcommand("forward", "operator file -> spectral file");
    forward->add_option("--in", in_path, "operator file")->required();
    forward->add_option("--out", out_path, "spectral file")->required();

    auto* inverse = app.add_subcommand("inverse", "spectral file -> operator file");
    inverse->add_option("--in", in_path, "spectral file")->required();
    inverse->add_option("--flavor", flavor_text, "splus or lplus")->required();
    inverse->add_option("--out", out_path, "operator file")->required();

    auto* validate = app.add_subcommand("validate", "check that spectral data is admissible");
    validate->add_option("--in", in_path, "spectral file")->required();

    auto* tame = app.add_subcommand("tame", "p-tameness and polynomial obstruction");
    tame->add_option("--in", in_path, "spectral file")->required();
    tame->add_option("--p", p_arg, "order p")->required();

    auto* mfun = app.add_subcommand("mfun", "evaluate M(z) or M_n(z)");
    mfun->add_option("--in", in_path, "spectral file")->required();
    mfun->add_option("--z", z_text, "evaluation point re,im")->required();
    mfun->add_option("--level", level, "level n in 1..p+1");
    mfun->add_option("--op", op_path, "operator file for levels n > 1");
    mfun->add_option("--flavor", flavor_text, "reconstruction flavor when --op is absent");

    auto* herglotz = app.add_subcommand("herglotz", "Herglotz representation of -M^{-1}");
    herglotz->add_option("--in", in_path, "spectral file")->required();
    herglotz->add_option("--flavor", flavor_text, "splus or lplus")->required();

    auto* roundtrip = app.add_subcommand("roundtrip", "inverse(forward(J)) against J");
    roundtrip->add_option("--in", in_path, "operator file")->required();

    auto* gen = app.add_subcommand("gen", "seeded random operator");
    gen->add_option("--m", m_arg, "block size")->required();
    gen->add_option("--p", p_arg, "number of blocks")->required();
    gen->add_option("--flavor", flavor_text, "splus or lplus")->required();
    gen->add_option("--seed", seed, "seed")->required();
    gen->add_option("--out", out_path, "operator file")->required();
    gen->add_option("--spectral", spec_out, "also write its spectral data here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? ExitCode::ok : ExitCode::usage;
    }
    if (check_tol_set) tol.sum = check_tol;

    try {
        if (*forward) {
            const BlockJacobiOperator J = load_operator(in_path, tol);
            const SpectralData data = forward_map(J, tol);
            save_spectral(out_path, data);
            out << to_text({{"points", data.size()}, {"m", data.m}, {"p", data.p}, {"out", out_path}});
            return ExitCode::ok;
        }
        if (*validate) {
            const ValidationReport rep = validate_sp(load_spectral(in_path, tol), tol);
            out << to_text(report_to_json(rep));
            return rep.ok ? ExitCode::ok : ExitCode::failed;
        }
        if (*inverse) {
            const Flavor flavor = parse_flavor(flavor_text);
            const SpectralData data = load_spectral(in_path, tol);
            const ValidationReport rep = validate_sp(data, tol);
            if (!rep.ok) {
                json j = report_to_json(rep);
                try {
                    inverse_map(data, flavor, tol);
                } catch (const LanczosBreakdown& e) {
                    j["lanczos_breakdown"] = {{"stage", e.stage()}, {"defect", e.defect()}, {"message", e.what()}};
                } catch (const Error& e) {
                    j["error"] = e.what();
                }
                out << to_text(j);
                return ExitCode::failed;
            }
            const BlockJacobiOperator J = inverse_map(data, flavor, tol);
            save_operator(out_path, J);
            out << to_text({{"m", J.m}, {"p", J.p}, {"flavor", flavor_name(J.flavor)}, {"out", out_path}});
            return ExitCode::ok;
        }
        if (*tame) {
            const SpectralData data = load_spectral(in_path, tol);
            const TameSystem sys = tame_system(data);
            const TameResult r = is_p_tame(sys, p_arg, tol);
            const auto obstruction = polynomial_obstruction(sys, p_arg, tol);
            json j{{"p", p_arg},
                   {"applicable", r.applicable},
                   {"rank_sum", r.rank_sum},
                   {"tame", r.tame},
                   {"defect", r.defect},
                   {"threshold", r.threshold}};
            if (obstruction) {
                json coeffs = json::array();
                for (const auto& v : *obstruction) coeffs.push_back(matrix_to_json(v));
                j["obstruction"] = std::move(coeffs);
            } else {
                j["obstruction"] = nullptr;
            }
            out << to_text(j);
            return r.tame ? ExitCode::ok : ExitCode::failed;
        }
        if (*mfun) {
            const Complex z = detail::parse_complex(z_text);
            const SpectralData data = load_spectral(in_path, tol);
            Matrix value;
            if (level == 1 && op_path.empty()) {
                value = eval_prf(residues(data, tol), z, tol);
            } else {
                const BlockJacobiOperator J =
                    op_path.empty() ? inverse_map(data, parse_flavor(flavor_text), tol) : load_operator(op_path, tol);
                value = m_level(J, z, level, tol);
            }
            out << to_text({{"z", {z.real(), z.imag()}}, {"level", level}, {"M", matrix_to_json(value)}});
            return ExitCode::ok;
        }
        if (*herglotz) {
            const SpectralData data = load_spectral(in_path, tol);
            const HerglotzDecomposition h = herglotz_decompose(data, parse_flavor(flavor_text), tol);
            json poles = json::array();
            for (std::size_t s = 0; s < h.function.poles.size(); ++s)
                poles.push_back({{"mu", h.function.poles[s].mu},
                                 {"D", matrix_to_json(h.function.poles[s].residue)},
                                 {"rank", h.ranks[s]}});
            out << to_text({{"C", matrix_to_json(*h.function.constant)},
                            {"poles", std::move(poles)},
                            {"rank_total", h.rank_total},
                            {"expected_rank_total", data.m * (data.p - 1)},
                            {"cancellation", h.cancellation}});
            return ExitCode::ok;
        }
        if (*roundtrip) {
            const BlockJacobiOperator J = load_operator(in_path, tol);
            if (J.flavor == Flavor::general)
                throw Error(Errc::schema, "$.flavor: roundtrip needs an splus or lplus operator");
            const BlockJacobiOperator back = inverse_map(forward_map(J, tol), J.flavor, tol);
            const double dev = detail::max_block_deviation(J, back);
            const bool passed = dev <= check_tol;
            out << to_text({{"max_block_deviation", dev}, {"tol", check_tol}, {"ok", passed}});
            return passed ? ExitCode::ok : ExitCode::failed;
        }
        if (*gen) {
            const BlockJacobiOperator J = gen_operator(m_arg, p_arg, parse_flavor(flavor_text), seed);
            save_operator(out_path, J);
            json j{{"m", m_arg}, {"p", p_arg}, {"flavor", flavor_name(J.flavor)}, {"seed", seed}, {"out", out_path}};
            if (!spec_out.empty()) {
                save_spectral(spec_out, forward_map(J, tol));
                j["spectral"] = spec_out;
            }
            out << to_text(j);
            return ExitCode::ok;
        }
    } catch (const LanczosBreakdown& e) {
        out << to_text({{"error", "LanczosBreakdown"}, {"stage", e.stage()}, {"defect", e.defect()},
                        {"message", e.what()}});
        return ExitCode::failed;
    } catch (const Error& e) {
        err << e.what() << "\n";
        switch (e.code()) {
            case Errc::schema:
            case Errc::io:
            case Errc::invalid_argument: return ExitCode::usage;
            default: return ExitCode::failed;
        }
    }
    return ExitCode::usage;
}

}  // namespace blockjac::cli

#endif  // BLOCKJAC_TOOLS_CLI_HPP
