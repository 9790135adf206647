#include <gtest/gtest.h>

#include <sstream>

#include "serre_adjoint/cli.hpp"

using namespace serre;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_args(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

}  // namespace

TEST(Cli, QexpDelta) {
    const auto r = run({"qexp", "--form", "delta", "--prec", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# config: "), std::string::npos);
    EXPECT_NE(r.out.find("0 0/1\n1 1/1\n2 -24/1\n3 252/1\n4 -1472/1\n"), std::string::npos);
}

TEST(Cli, QexpJsonRoundTrips) {
    const auto r = run({"qexp", "--form", "delta_10_2", "--prec", "12", "--output", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("config").at("command"), "qexp");
    EXPECT_EQ(qexpansion_from_json(j.at("qexpansion")), delta_10_2(12));
}

TEST(Cli, Decompose) {
    const auto r = run({"decompose", "--form", "serre(delta_10_2,10)", "--space", "12,2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("coordinates: 1/6, 128/3"), std::string::npos);
    EXPECT_NE(r.out.find("decimal: 0.16666666666666666, 42.666666666666664"), std::string::npos);
}

TEST(Cli, LvalueJson) {
    const auto r = run({"lvalue", "--form", "delta", "--m", "1", "--s", "11", "--tol", "1e-10"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j.at("value").get<double>(), -1.0 / 120, 1e-10);
    EXPECT_LE(j.at("error_bound").get<double>(), 1e-10);
    EXPECT_EQ(j.at("exact"), "-1/120");
    EXPECT_EQ(j.at("bound_kind"), "proven");
    EXPECT_TRUE(j.contains("horizon"));
    EXPECT_EQ(j.at("config").at("k"), 10);
}

TEST(Cli, AdjointJsonLines) {
    const auto r = run({"adjoint", "--form", "delta", "--k", "10", "--level", "1", "--mmax", "20", "--tol", "1e-10"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 21u);
    EXPECT_TRUE(nlohmann::json::parse(ls[0]).contains("config"));
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto row = nlohmann::json::parse(ls[i]);
        EXPECT_EQ(row.at("m").get<int>(), static_cast<int>(i));
        EXPECT_LE(std::abs(row.at("c").get<double>()), row.at("error_bound").get<double>());
        EXPECT_EQ(row.at("c_times_pi2_exact"), "0/1");
    }
}

TEST(Cli, PeterssonJson) {
    const auto r = run({"petersson", "--f", "delta", "--g", "v2delta", "--k", "12", "--level", "2", "--nodes", "32"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    for (const char* key : {"value", "est_error", "nodes", "y_cutoff"}) EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_LT(j.at("value").get<double>(), 0.0);
}

TEST(Cli, Scans) {
    const auto b = run({"scan", "--kind", "bound", "--mmax", "10"});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_NE(b.out.find("m,tau,l_value,scaled,limit,pass\n1,1,-1/120,"), std::string::npos);
    const auto s = run({"scan", "--kind", "sign", "--mmax", "5", "--output", "json"});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(lines(s.out).size(), 7u);
    const auto d = run({"scan", "--kind", "deligne", "--form", "delta_10_2", "--mmax", "50"});
    ASSERT_EQ(d.code, 0) << d.err;
    EXPECT_NE(d.out.find("\"passed\":true"), std::string::npos);
}

TEST(Cli, Determinism) {
    const std::vector<std::string> args{"adjoint", "--form", "v2delta", "--mmax", "3", "--tol", "1e-12"};
    EXPECT_EQ(run(args).out, run(args).out);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({"qexp", "--form", "delta", "--bogus", "1"}).code, cli::kUsage);
    EXPECT_EQ(run({}).code, cli::kUsage);
    EXPECT_EQ(run({"qexp", "--form", "gamma"}).code, cli::kUsage);
    EXPECT_EQ(run({"qexp", "--form", "delta", "--output", "xml"}).code, cli::kUsage);
    EXPECT_EQ(run({"lvalue", "--form", "delta", "--m", "1", "--tol", "abc"}).code, cli::kUsage);
    EXPECT_EQ(run({"decompose", "--form", "delta", "--space", "16,1"}).code, cli::kComputation);
    EXPECT_EQ(run({"decompose", "--form", "eisenstein(12)", "--space", "12,1"}).code, cli::kComputation);
    EXPECT_EQ(run({"lvalue", "--form", "delta", "--m", "1", "--s", "7"}).code, cli::kComputation);
    EXPECT_EQ(run({"--help"}).code, cli::kOk);
}

TEST(Cli, VerifySingleCriterion) {
    const auto r = run({"verify", "--criterion", "1", "--criterion", "2"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("PASS"), std::string::npos);
    EXPECT_EQ(run({"verify", "--criterion", "12"}).code, cli::kUsage);
}
