#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "test_support.hpp"

using namespace blockjac;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "blockjac");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class TempDir : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("blockjac_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const char* name) const { return (dir / name).string(); }
};

}  // namespace

TEST(serialization, operator_round_trip_is_exact) {
    for (Flavor flavor : {Flavor::splus, Flavor::lplus}) {
        const BlockJacobiOperator J = gen_operator(3, 4, flavor, 5);
        const json j = operator_to_json(J);
        const BlockJacobiOperator back = operator_from_json(j);
        EXPECT_EQ(back.flavor, flavor);
        for (std::size_t n = 0; n < J.b.size(); ++n) EXPECT_EQ(back.b[n], J.b[n]);
        for (std::size_t n = 0; n < J.a.size(); ++n) EXPECT_EQ(back.a[n], J.a[n]);
        EXPECT_EQ(to_text(operator_to_json(back)), to_text(j));
    }
}

TEST(serialization, spectral_round_trip_is_exact) {
    const SpectralData d = gen_spectral(3, 3, 6);
    const json j = spectral_to_json(d);
    const SpectralData back = spectral_from_json(json::parse(to_text(j)));
    ASSERT_EQ(back.size(), d.size());
    for (std::size_t i = 0; i < d.points.size(); ++i) {
        EXPECT_EQ(back.points[i].lambda, d.points[i].lambda);
        EXPECT_EQ(back.points[i].P, d.points[i].P);
        EXPECT_EQ(back.points[i].g, d.points[i].g);
        EXPECT_EQ(back.points[i].multiplicity, d.points[i].multiplicity);
    }
    EXPECT_EQ(to_text(spectral_to_json(back)), to_text(j));
}

TEST(serialization, schema_errors_carry_paths) {
    json j = operator_to_json(gen_operator(2, 2, Flavor::splus, 1));
    auto expect_schema = [](const json& bad, const std::string& fragment) {
        try {
            operator_from_json(bad);
            FAIL() << "expected schema error";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::schema);
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
        }
    };
    json missing = j;
    missing.erase("b");
    expect_schema(missing, "'b'");
    json version = j;
    version["schema_version"] = 99;
    expect_schema(version, "$.schema_version");
    json entry = j;
    entry["a"][0][1][0][0] = "x";
    expect_schema(entry, "$.a[0][1][0][0]");
    json shape = j;
    shape["b"][1].erase(0);
    expect_schema(shape, "$.b[1]");
    json flavor = j;
    flavor["flavor"] = "upper";
    expect_schema(flavor, "$.flavor");
    json not_hpd = j;
    not_hpd["a"][0][0][0] = json::array({-5.0, 0.0});
    expect_schema(not_hpd, "$");
}

TEST(gen_operator, deterministic_and_valid) {
    for (Flavor flavor : {Flavor::splus, Flavor::lplus}) {
        const BlockJacobiOperator x = gen_operator(3, 4, flavor, 77);
        const BlockJacobiOperator y = gen_operator(3, 4, flavor, 77);
        const BlockJacobiOperator z = gen_operator(3, 4, flavor, 78);
        EXPECT_EQ(to_text(operator_to_json(x)), to_text(operator_to_json(y)));
        EXPECT_NE(to_text(operator_to_json(x)), to_text(operator_to_json(z)));
        EXPECT_NO_THROW(validate_operator(x));
    }
    EXPECT_THROW(gen_operator(2, 2, Flavor::general, 1), Error);
}

TEST_F(TempDir, cli_pipeline) {
    auto r = run_cli({"gen", "--m", "2", "--p", "3", "--flavor", "lplus", "--seed", "9", "--out", path("op.json"),
                      "--spectral", path("gen_sp.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    r = run_cli({"forward", "--in", path("op.json"), "--out", path("sp.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(path("sp.json")), slurp(path("gen_sp.json")));

    r = run_cli({"validate", "--in", path("sp.json")});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(json::parse(r.out)["ok"].get<bool>());

    r = run_cli({"inverse", "--in", path("sp.json"), "--flavor", "lplus", "--out", path("back.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const BlockJacobiOperator J = load_operator(path("op.json"));
    EXPECT_LT(testkit::max_block_error(load_operator(path("back.json")), J), 1e-10);

    r = run_cli({"roundtrip", "--in", path("op.json")});
    EXPECT_EQ(r.code, 0);
    EXPECT_LT(json::parse(r.out)["max_block_deviation"].get<double>(), 1e-8);

    r = run_cli({"tame", "--in", path("sp.json"), "--p", "3"});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(json::parse(r.out)["obstruction"].is_null());

    r = run_cli({"mfun", "--in", path("sp.json"), "--z", "0.5,1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Matrix M = matrix_from_json(json::parse(r.out)["M"], 2, 2, "$.M");
    EXPECT_LT(testkit::rel_err(M, weyl_m(J, Complex(0.5, 1))), 1e-10);

    r = run_cli({"mfun", "--in", path("sp.json"), "--z", "0.5,1", "--level", "2", "--op", path("op.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const Matrix M2 = matrix_from_json(json::parse(r.out)["M"], 2, 2, "$.M");
    EXPECT_LT(testkit::rel_err(M2, m_level(J, Complex(0.5, 1), 2)), 1e-12);

    r = run_cli({"herglotz", "--in", path("sp.json"), "--flavor", "lplus"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json h = json::parse(r.out);
    EXPECT_EQ(h["rank_total"], h["expected_rank_total"]);
}

TEST_F(TempDir, cli_failures) {
    EXPECT_EQ(run_cli({"bogus"}).code, 2);
    EXPECT_EQ(run_cli({"forward", "--in", path("missing.json"), "--out", path("x.json")}).code, 2);
    write_text_file(path("garbage.json"), "{ not json");
    EXPECT_EQ(run_cli({"validate", "--in", path("garbage.json")}).code, 2);
    EXPECT_EQ(run_cli({"mfun", "--in", path("garbage.json"), "--z", "a,b"}).code, 2);

    std::mt19937_64 rng(3);
    save_spectral(path("bad.json"), testkit::two_kernel_data(rng, 3, 1, true));
    auto r = run_cli({"validate", "--in", path("bad.json")});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(json::parse(r.out)["ok"].get<bool>());
    r = run_cli({"inverse", "--in", path("bad.json"), "--flavor", "splus", "--out", path("never.json")});
    EXPECT_EQ(r.code, 1);
    EXPECT_TRUE(json::parse(r.out).contains("lanczos_breakdown"));
    EXPECT_FALSE(fs::exists(path("never.json")));
}
