#ifndef BLOCKJAC_IO_HPP
#define BLOCKJAC_IO_HPP

// JSON persistence for operators, spectral data and validation reports.
//
// Complex entries are [re, im] pairs and matrices are row-major nested
// arrays. Doubles are written in the shortest form that reads back to the
// same binary64 value, so save(load(save(x))) is byte-identical.

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "inverse.hpp"
#include "tame.hpp"

namespace blockjac {

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;
inline constexpr const char* operator_kind = "block_jacobi_operator";
inline constexpr const char* spectral_kind = "spectral_data";

inline json matrix_to_json(const Matrix& a) {
    json rows = json::array();
    for (Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < a.cols(); ++j) row.push_back(json::array({a(i, j).real(), a(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace detail {

[[noreturn]] inline void schema_fail(const std::string& path, const std::string& msg) {
    throw Error(Errc::schema, path + ": " + msg);
}

inline const json& field(const json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) schema_fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema_fail(path, std::string("missing field '") + key + "'");
    return *it;
}

inline double number(const json& v, const std::string& path) {
    if (!v.is_number()) schema_fail(path, "expected a number");
    return v.get<double>();
}

inline Index count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 1) schema_fail(path, "expected a positive integer");
    return static_cast<Index>(v.get<long long>());
}

}  // namespace detail

/// Parses an rows x cols matrix at `path` (used in error messages).
inline Matrix matrix_from_json(const json& v, Index rows, Index cols, const std::string& path) {
    using detail::schema_fail;
    if (!v.is_array() || static_cast<Index>(v.size()) != rows)
        schema_fail(path, "expected an array of " + std::to_string(rows) + " rows");
    Matrix a(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        const std::string rpath = path + "[" + std::to_string(i) + "]";
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            schema_fail(rpath, "expected an array of " + std::to_string(cols) + " entries");
        for (Index j = 0; j < cols; ++j) {
            const json& e = row[static_cast<std::size_t>(j)];
            const std::string epath = rpath + "[" + std::to_string(j) + "]";
            if (!e.is_array() || e.size() != 2) schema_fail(epath, "expected a [re, im] pair");
            const double re = detail::number(e[0], epath + "[0]");
            const double im = detail::number(e[1], epath + "[1]");
            if (!std::isfinite(re) || !std::isfinite(im)) schema_fail(epath, "non-finite entry");
            a(i, j) = Complex(re, im);
        }
    }
    return a;
}

inline json operator_to_json(const BlockJacobiOperator& J) {
    json out;
    out["schema_version"] = schema_version;
    out["kind"] = operator_kind;
    out["m"] = J.m;
    out["p"] = J.p;
    out["flavor"] = flavor_name(J.flavor);
    out["b"] = json::array();
    for (const auto& bn : J.b) out["b"].push_back(matrix_to_json(bn));
    out["a"] = json::array();
    for (const auto& an : J.a) out["a"].push_back(matrix_to_json(an));
    return out;
}

inline void check_header(const json& j, const char* kind) {
    using detail::schema_fail;
    const json& version = detail::field(j, "$", "schema_version");
    if (!version.is_number_integer() || version.get<int>() != schema_version)
        schema_fail("$.schema_version", "unsupported schema version");
    if (const auto it = j.find("kind"); it != j.end() && (!it->is_string() || it->get<std::string>() != kind))
        schema_fail("$.kind", std::string("expected '") + kind + "'");
}

inline BlockJacobiOperator operator_from_json(const json& j, const Tolerances& tol = default_tolerances) {
    using detail::schema_fail;
    check_header(j, operator_kind);
    BlockJacobiOperator J;
    J.m = detail::count(detail::field(j, "$", "m"), "$.m");
    J.p = detail::count(detail::field(j, "$", "p"), "$.p");
    const json& flavor = detail::field(j, "$", "flavor");
    if (!flavor.is_string()) schema_fail("$.flavor", "expected a string");
    try {
        J.flavor = parse_flavor(flavor.get<std::string>());
    } catch (const Error& e) {
        schema_fail("$.flavor", e.what());
    }
    const json& b = detail::field(j, "$", "b");
    const json& a = detail::field(j, "$", "a");
    if (!b.is_array() || static_cast<Index>(b.size()) != J.p) schema_fail("$.b", "expected p matrices");
    if (!a.is_array() || static_cast<Index>(a.size()) != J.p - 1) schema_fail("$.a", "expected p-1 matrices");
    for (Index n = 0; n < J.p; ++n)
        J.b.push_back(matrix_from_json(b[static_cast<std::size_t>(n)], J.m, J.m, "$.b[" + std::to_string(n) + "]"));
    for (Index n = 0; n + 1 < J.p; ++n)
        J.a.push_back(matrix_from_json(a[static_cast<std::size_t>(n)], J.m, J.m, "$.a[" + std::to_string(n) + "]"));
    try {
        validate_operator(J, tol);
    } catch (const Error& e) {
        schema_fail("$", e.what());
    }
    return J;
}

inline json spectral_to_json(const SpectralData& data) {
    json out;
    out["schema_version"] = schema_version;
    out["kind"] = spectral_kind;
    out["m"] = data.m;
    out["p"] = data.p;
    out["points"] = json::array();
    for (const auto& pt : data.points) {
        json jp;
        jp["lambda"] = pt.lambda;
        jp["P"] = matrix_to_json(pt.P);
        jp["g"] = matrix_to_json(pt.g);
        out["points"].push_back(std::move(jp));
    }
    return out;
}

/// Multiplicities are recomputed as numerical ranks of the stored projectors.
inline SpectralData spectral_from_json(const json& j, const Tolerances& tol = default_tolerances) {
    using detail::schema_fail;
    check_header(j, spectral_kind);
    SpectralData data;
    data.m = detail::count(detail::field(j, "$", "m"), "$.m");
    data.p = detail::count(detail::field(j, "$", "p"), "$.p");
    const json& points = detail::field(j, "$", "points");
    if (!points.is_array()) schema_fail("$.points", "expected an array");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::string path = "$.points[" + std::to_string(i) + "]";
        const json& jp = points[i];
        SpectralPoint pt;
        pt.lambda = detail::number(detail::field(jp, path, "lambda"), path + ".lambda");
        pt.P = matrix_from_json(detail::field(jp, path, "P"), data.m, data.m, path + ".P");
        pt.g = matrix_from_json(detail::field(jp, path, "g"), data.m, data.m, path + ".g");
        pt.multiplicity = numerical_rank(pt.P, tol.rank);
        data.points.push_back(std::move(pt));
    }
    return data;
}

inline json report_to_json(const ValidationReport& rep) {
    json out;
    out["ok"] = rep.ok;
    out["checks"] = json::array();
    for (const auto& c : rep.checks) {
        json jc;
        jc["name"] = c.name;
        jc["passed"] = c.passed;
        jc["defect"] = std::isfinite(c.defect) ? json(c.defect) : json(c.defect > 0 ? "inf" : "-inf");
        jc["detail"] = c.detail;
        out["checks"].push_back(std::move(jc));
    }
    return out;
}

namespace detail {

inline bool is_flat(const json& j) {
    if (!j.is_array()) return !j.is_object();
    for (const auto& e : j)
        if (e.is_object() || (e.is_array() && !std::all_of(e.begin(), e.end(), [](const json& x) {
                                  return x.is_primitive();
                              })))
            return false;
    return true;
}

inline void write_pretty(const json& j, int indent, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    if (j.is_object() && !j.empty()) {
        out += "{\n";
        std::size_t i = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++i) {
            out += pad + json(it.key()).dump() + ": ";
            write_pretty(it.value(), indent + 2, out);
            out += i + 1 < j.size() ? ",\n" : "\n";
        }
        out += std::string(static_cast<std::size_t>(indent), ' ') + "}";
    } else if (j.is_array() && !j.empty() && !is_flat(j)) {
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            out += pad;
            write_pretty(j[i], indent + 2, out);
            out += i + 1 < j.size() ? ",\n" : "\n";
        }
        out += std::string(static_cast<std::size_t>(indent), ' ') + "]";
    } else {
        out += j.dump();
    }
}

}  // namespace detail

/// Indented JSON with matrix rows kept on one line.
inline std::string to_text(const json& j) {
    std::string out;
    detail::write_pretty(j, 0, out);
    return out + "\n";
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw Error(Errc::schema, path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(Errc::io, "write to '" + path + "' failed");
}

inline void save_operator(const std::string& path, const BlockJacobiOperator& J) {
    write_text_file(path, to_text(operator_to_json(J)));
}

inline BlockJacobiOperator load_operator(const std::string& path, const Tolerances& tol = default_tolerances) {
    return operator_from_json(read_json_file(path), tol);
}

inline void save_spectral(const std::string& path, const SpectralData& data) {
    write_text_file(path, to_text(spectral_to_json(data)));
}

inline SpectralData load_spectral(const std::string& path, const Tolerances& tol = default_tolerances) {
    return spectral_from_json(read_json_file(path), tol);
}

}  // namespace blockjac

#endif  // BLOCKJAC_IO_HPP
