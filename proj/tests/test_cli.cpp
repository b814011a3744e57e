#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using lmoment::cli::json;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome call(std::vector<std::string> args)
{
    args.insert(args.begin(), "lmoment");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = lmoment::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "lmoment_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Cli, MomentReportToFile)
{
    const auto path = scratch("moment.json");
    const auto r = call({"moment", "--q", "101", "--data", LMOMENT_DATA, "--out", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(slurp(path));
    for (const char* key : {"schema_version", "command", "inputs", "outputs", "certificates", "runtime_ms"})
        EXPECT_TRUE(doc.contains(key)) << key;
    EXPECT_EQ(doc["schema_version"], "lmoment/1");
    EXPECT_EQ(doc["command"], "moment");
    EXPECT_EQ(doc["outputs"]["q"], 101);
    EXPECT_EQ(doc["outputs"]["characters"], 49);
    EXPECT_TRUE(doc["certificates"]["pass"].get<bool>());
    EXPECT_FALSE(doc["outputs"]["witnesses"].empty());
}

TEST(Cli, CompositeModulusIsUsageError)
{
    const auto r = call({"moment", "--q", "100", "--data", LMOMENT_DATA});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("not prime"), std::string::npos) << r.err;
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, MockVoronoiIsFlaggedAsNegativeControl)
{
    const auto r = call({"voronoi", "--q", "7", "--d", "1", "--N", "50", "--mock", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_EQ(doc["outputs"]["status"], "negative-control");
    EXPECT_GT(doc["outputs"]["residual"].get<double>(), 1e-3);
}

TEST(Cli, RealVoronoiPasses)
{
    const auto r = call({"voronoi", "--q", "7", "--d", "1", "--N", "50", "--data", LMOMENT_DATA});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_EQ(doc["outputs"]["status"], "identity-check");
    EXPECT_LE(doc["outputs"]["residual"].get<double>(), 1e-3);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(call({}).code, 1);
    EXPECT_EQ(call({"frobnicate"}).code, 1);
    EXPECT_EQ(call({"chars"}).code, 1);
    EXPECT_EQ(call({"chars", "--q", "13", "--workers", "0"}).code, 1);
    EXPECT_EQ(call({"chars", "--q", "13", "--format", "xml"}).code, 1);
    EXPECT_EQ(call({"moment", "--q", "101"}).code, 1);  // neither --data nor --mock
    EXPECT_EQ(call({"lvalue", "--q", "13", "--k", "0"}).code, 1);
    EXPECT_EQ(call({"lvalue", "--q", "13", "--k", "3"}).code, 1);
    EXPECT_EQ(call({"lvalue", "--q", "13", "--k", "2", "--format", "csv"}).code, 1);
    EXPECT_EQ(call({"voronoi", "--q", "7", "--d", "14", "--N", "50", "--mock"}).code, 1);
    EXPECT_EQ(call({"--help"}).code, 0);
}

TEST(Cli, DataErrors)
{
    const auto bad = scratch("bad.txt");
    std::ofstream(bad) << "maass v1\nT_f 13.7\nparity even\nprecision 1e-10\npmax 3\n2 3.0\n3 0.1\n";
    const auto r = call({"check-data", "--data", bad.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.err.empty());
    EXPECT_EQ(call({"check-data", "--data", "/nonexistent/file.txt"}).code, 2);
    EXPECT_EQ(call({"moment", "--q", "101", "--data", bad.string()}).code, 2);
}

TEST(Cli, FailedCertificateIsNumericalError)
{
    const auto r = call({"gauss", "--q", "13", "--tol", "1e-30"});
    EXPECT_EQ(r.code, 3);
    EXPECT_FALSE(json::parse(r.out)["certificates"]["pass"].get<bool>());
}

TEST(Cli, CheckData)
{
    const auto r = call({"check-data", "--data", LMOMENT_DATA});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_EQ(doc["outputs"]["pmax"], 120000);
    EXPECT_FALSE(doc["certificates"]["average_bound_flagged"].get<bool>());
}

TEST(Cli, CharsCensus)
{
    const auto r = call({"chars", "--q", "13"});
    ASSERT_EQ(r.code, 0);
    const auto doc = json::parse(r.out);
    EXPECT_EQ(doc["outputs"]["even_primitive"], 5);
    EXPECT_EQ(doc["outputs"]["orthogonality_matrix"][0][0], 11);
    EXPECT_EQ(doc["outputs"]["orthogonality_matrix"][0][1], -1);
    EXPECT_LE(doc["certificates"]["orthogonality_max_deviation"].get<double>(), 1e-10);
}

TEST(Cli, KloostermanAndGaussTables)
{
    const auto k = call({"kloosterman", "--q", "11", "--format", "csv"});
    ASSERT_EQ(k.code, 0);
    EXPECT_EQ(k.out.substr(0, k.out.find("\r\n")), "a,b,S,margin");
    EXPECT_EQ(std::count(k.out.begin(), k.out.end(), '\n'), 1 + 121);
    const auto g = call({"gauss", "--q", "11"});
    ASSERT_EQ(g.code, 0);
    EXPECT_EQ(json::parse(g.out)["outputs"]["gauss_sums"].size(), 9u);
}

TEST(Cli, TwistedLValue)
{
    const auto r = call({"lvalue", "--q", "101", "--k", "2", "--twist", "--data", LMOMENT_DATA});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(json::parse(r.out)["certificates"]["pass"].get<bool>());
}

TEST(Cli, CsvQuoting)
{
    using lmoment::cli::csv_field;
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
}

TEST(Cli, ScanIsByteIdenticalAcrossWorkerCounts)
{
    const auto a = scratch("scan1.json"), b = scratch("scan4.json");
    ASSERT_EQ(call({"scan", "--qmin", "100", "--qmax", "140", "--data", LMOMENT_DATA, "--workers", "1", "--no-timing",
                    "--out", a.string()})
                  .code,
              0);
    ASSERT_EQ(call({"scan", "--qmin", "100", "--qmax", "140", "--data", LMOMENT_DATA, "--workers", "4", "--no-timing",
                    "--out", b.string()})
                  .code,
              0);
    EXPECT_EQ(slurp(a), slurp(b));
    const auto doc = json::parse(slurp(a));
    EXPECT_EQ(doc["outputs"]["reports"].size(), 9u);
    EXPECT_EQ(doc["runtime_ms"], 0.0);
}

TEST(Cli, ScanCsv)
{
    const auto r = call({"scan", "--qmin", "100", "--qmax", "110", "--data", LMOMENT_DATA, "--format", "csv"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find("\r\n")),
              "q,moment_re,moment_im,main_term,ratio,witnesses,twist_cutoff,dirichlet_cutoff");
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 4);
}
