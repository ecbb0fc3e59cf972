#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "yorkl_cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "yorkl");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = yorkl::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> v;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);)
        v.push_back(l);
    return v;
}

// data records only, meta line dropped
std::vector<json> records(const std::string& text)
{
    std::vector<json> v;
    for (const auto& l : lines(text)) {
        auto j = json::parse(l);
        if (!j.contains("meta"))
            v.push_back(j);
    }
    return v;
}

class TempDir : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() / ("yorkl-cli-" + std::to_string(::getpid()) + "-"
                                            + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
        ::setenv("YORKL_OUTPUT_DIR", dir_.c_str(), 1);
    }
    void TearDown() override
    {
        ::unsetenv("YORKL_OUTPUT_DIR");
        fs::remove_all(dir_);
    }
    fs::path dir_;
};

TEST(CliEval, YorSpectralRecord)
{
    const auto r = run({"eval", "--target", "yor_spectral", "--r", "1", "--t", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto recs = records(r.out);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_NEAR(recs[0]["value"].get<double>(), 1.47815306260646383, 1e-10);
    EXPECT_EQ(recs[0]["method"], "spectral");
    EXPECT_TRUE(recs[0].contains("error_estimate"));
    const auto all = lines(r.out);
    EXPECT_TRUE(json::parse(all.back())["meta"].contains("wall_time_s"));
}

TEST(CliEval, PolyEval)
{
    const auto r = run({"eval", "--target", "poly_eval", "--n", "3", "--x", "2"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(records(r.out)[0]["value"].get<double>(), -62.0);
}

TEST(CliEval, OtherTargets)
{
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"eval", "--target", "yor_direct", "--r", "2", "--t", "0.5"},
             {"eval", "--target", "bessel_k_imag", "--tau", "8", "--x", "1"},
             {"eval", "--target", "heat_kernel", "--t", "1", "--x", "1", "--y", "2"},
             {"eval", "--target", "kl_forward", "--f", "exp", "--tau", "1"},
             {"eval", "--target", "kl_forward", "--f", "one", "--tau", "0"}}) {
        const auto r = run(args);
        EXPECT_EQ(r.code, 0) << args[2] << ": " << r.err;
    }
    const auto k = records(run({"eval", "--target", "bessel_k_imag", "--tau", "8", "--x", "1"}).out)[0];
    EXPECT_NEAR(k["value"].get<double>() / 2.049184651374575592634e-6, 1.0, 1e-10);
    const auto g = records(run({"eval", "--target", "kl_forward", "--f", "one", "--tau", "0"}).out)[0];
    EXPECT_NEAR(g["value"].get<double>(), std::numbers::pi / 2.0, 1e-9);
}

TEST(CliEval, SmallTimeIsUsageError)
{
    const auto r = run({"eval", "--target", "yor_direct", "--r", "1", "--t", "0.05"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("small-t"), std::string::npos) << r.err;
    EXPECT_TRUE(r.out.empty());
}

TEST(CliEval, BadArgumentsExitTwo)
{
    EXPECT_EQ(run({"eval", "--target", "nope"}).code, 2);
    EXPECT_EQ(run({"eval", "--target", "yor_spectral", "--r", "1"}).code, 2);
    EXPECT_EQ(run({"eval", "--target", "yor_spectral", "--r", "x", "--t", "1"}).code, 2);
    EXPECT_EQ(run({"eval", "--target", "poly_eval", "--n", "3", "--x", "2", "--rel-tol", "0"}).code, 2);
    EXPECT_EQ(run({"launch"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"eval", "--target", "poly_eval", "--n", "3", "--x", "2", "--format", "xml"}).code, 2);
}

TEST(CliEval, HelpExitsZero)
{
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("--format"), std::string::npos);
}

TEST(CliTable, YorGridRowsInOrder)
{
    const auto r = run({"table", "--target", "yor", "--r", "0.5:5:10", "--t", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto recs = records(r.out);
    ASSERT_EQ(recs.size(), 10u);
    EXPECT_DOUBLE_EQ(recs.front()["r"].get<double>(), 0.5);
    EXPECT_DOUBLE_EQ(recs.back()["r"].get<double>(), 5.0);
    for (std::size_t i = 1; i < recs.size(); ++i)
        EXPECT_GT(recs[i]["r"].get<double>(), recs[i - 1]["r"].get<double>());
    EXPECT_NEAR(recs[1]["F"].get<double>(), 1.47815306260646383, 1e-10);
}

TEST(CliTable, TwoDimensionalGridIsTMajor)
{
    const auto r = run({"table", "--target", "yor", "--r", "1:2:3", "--t", "1:2:2", "--method", "direct"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto recs = records(r.out);
    ASSERT_EQ(recs.size(), 6u);
    EXPECT_DOUBLE_EQ(recs[2]["t"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(recs[3]["t"].get<double>(), 2.0);
    EXPECT_DOUBLE_EQ(recs[3]["r"].get<double>(), 1.0);
}

TEST(CliTable, MalformedGridsExitTwo)
{
    for (const std::string g : {"5:1:3", "1:2:1", "1:2", "a:2:3", "1:2:3:4", "1:1:4", "1:2:x"}) {
        const auto r = run({"table", "--target", "yor", "--r", g, "--t", "1"});
        EXPECT_EQ(r.code, 2) << g;
        EXPECT_FALSE(r.err.empty());
    }
    EXPECT_EQ(run({"table", "--target", "yor", "--r", "1", "--t", "0.01:1:3"}).code, 2);
}

TEST(CliTable, CoefficientsAsExactStrings)
{
    const auto r = run({"table", "--target", "coeffs", "--nmax", "5"});
    ASSERT_EQ(r.code, 0);
    const auto recs = records(r.out);
    EXPECT_EQ(recs.size(), 21u);
    bool found = false;
    for (const auto& j : recs)
        if (j["n"] == 3 && j["k"] == 3) {
            EXPECT_EQ(j["a"], "-15");
            found = true;
        }
    EXPECT_TRUE(found);
    const auto big = records(run({"table", "--target", "coeffs", "--nmax", "12"}).out);
    EXPECT_EQ(big.back()["a"], "316234143225");
    const auto huge = records(run({"table", "--target", "coeffs", "--nmax", "25"}).out);
    EXPECT_EQ(huge.back()["a"], "-58435841445947272053455474390625"); // -(49)!!
}

TEST(CliTable, AsymptoticStudy)
{
    const auto r = run({"table", "--target", "asymptotics"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto recs = records(r.out);
    EXPECT_EQ(recs.size(), 75u);
    EXPECT_EQ(recs.back()["n"], 25);
    EXPECT_DOUBLE_EQ(recs.back()["beta"].get<double>(), 1.5);
}

TEST(CliFormat, CsvAndJsonCarrySameNumbers)
{
    const std::vector<std::string> base{"table", "--target", "yor", "--r", "0.5:3:4", "--t", "1.5"};
    auto csv_args = base;
    csv_args.insert(csv_args.end(), {"--format", "csv"});
    const auto j = run(base);
    const auto c = run(csv_args);
    ASSERT_EQ(j.code, 0);
    ASSERT_EQ(c.code, 0);
    const auto csv = lines(c.out);
    ASSERT_EQ(csv.front(), "r,t,F,err");
    const auto recs = records(j.out);
    ASSERT_EQ(csv.size(), recs.size() + 1);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        std::ostringstream row;
        row << recs[i]["r"].dump() << ',' << recs[i]["t"].dump() << ',' << recs[i]["F"].dump() << ','
            << recs[i]["err"].dump();
        EXPECT_EQ(csv[i + 1], row.str());
    }
    // the CSV meta record goes to stderr
    EXPECT_NE(c.err.find("wall_time_s"), std::string::npos);
}

TEST(CliFormat, DeterministicData)
{
    const auto a = records(run({"table", "--target", "yor", "--r", "0.5:8:6", "--t", "2"}).out);
    const auto b = records(run({"table", "--target", "yor", "--r", "0.5:8:6", "--t", "2"}).out);
    EXPECT_EQ(a, b);
}

TEST(CliFormat, ShortestRoundTripNumbers)
{
    EXPECT_EQ(yorkl::cli::number(0.1), "0.1");
    EXPECT_EQ(yorkl::cli::number(-62.0), "-62");
    const double v = 1.47815306260646383;
    EXPECT_EQ(std::stod(yorkl::cli::number(v)), v);
}

TEST(CliCrosscheck, ReportSchemaAndExitCodes)
{
    const auto ok = run({"crosscheck", "--name", "macdonald", "--tau", "0.5", "--x", "1", "--y", "2"});
    ASSERT_EQ(ok.code, 0) << ok.err;
    const auto rec = records(ok.out)[0];
    for (const char* key : {"context", "lhs", "rhs", "rel_diff", "tolerance", "passed"})
        EXPECT_TRUE(rec.contains(key)) << key;
    EXPECT_TRUE(rec["passed"].get<bool>());

    // e^{pi^2/4t} / (t sqrt(pi t)) is twice the true norm
    const auto bad = run({"crosscheck", "--name", "squared_norm", "--t", "1"});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("FAIL"), std::string::npos);

    EXPECT_EQ(run({"crosscheck", "--name", "generating", "--x", "1", "--t", "0.5", "--N", "12"}).code, 0);
    EXPECT_EQ(run({"crosscheck", "--name", "bernoulli", "--n", "2"}).code, 0);
    EXPECT_EQ(run({"crosscheck", "--name", "direct_spectral", "--r", "2", "--t", "1"}).code, 0);
    EXPECT_EQ(run({"crosscheck", "--name", "derivative_bound", "--r", "1", "--t", "1", "--m", "2"}).code, 0);
    EXPECT_EQ(run({"crosscheck", "--name", "diffusion_rf", "--r", "1", "--t", "1"}).code, 0);
    EXPECT_EQ(run({"crosscheck", "--name", "heat_symmetry", "--t", "1", "--x", "1", "--y", "3"}).code, 0);
    EXPECT_EQ(run({"crosscheck", "--name", "nope"}).code, 2);
}

TEST(CliCrosscheck, ToleranceOverride)
{
    // four terms at x = t = 1 leave a relative gap near 1.3e-4
    const auto strict = run({"crosscheck", "--name", "generating", "--x", "1", "--t", "1", "--N", "4"});
    EXPECT_EQ(strict.code, 1);
    const auto loose = run({"crosscheck", "--name", "generating", "--x", "1", "--t", "1", "--N", "4", "--tolerance", "1e-3"});
    EXPECT_EQ(loose.code, 0);
    EXPECT_DOUBLE_EQ(records(loose.out)[0]["tolerance"].get<double>(), 1e-3);
    EXPECT_EQ(run({"crosscheck", "--name", "bernoulli", "--n", "1", "--tolerance", "-1"}).code, 2);
}

TEST_F(TempDir, SuiteWritesReportToOutputDir)
{
    const auto r = run({"suite", "--name", "polys", "--nmax", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto path = dir_ / "suite-polys.jsonl";
    ASSERT_TRUE(fs::exists(path));
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto recs = records(ss.str());
    EXPECT_GT(recs.size(), 300u);
    for (const auto& j : recs) {
        EXPECT_TRUE(j["passed"].get<bool>()) << j["context"];
        EXPECT_EQ(j.size(), 6u);
    }
}

TEST_F(TempDir, ExplicitOutputAndConfigFile)
{
    const auto cfg = dir_ / "run.ini";
    std::ofstream(cfg) << "target = poly_eval\nn = 4\nx = 1\nformat = csv\n";
    const auto r = run({"eval", "--config", cfg.string(), "--output", "p4.csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(dir_ / "p4.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header, "target,n,x,value,method");
    EXPECT_EQ(row, "poly_eval,4,1,-43,exact");
}

TEST_F(TempDir, SuiteBesselAndBadName)
{
    EXPECT_EQ(run({"suite", "--name", "bessel"}).code, 0);
    EXPECT_TRUE(fs::exists(dir_ / "suite-bessel.jsonl"));
    EXPECT_EQ(run({"suite", "--name", "everything"}).code, 2);
}

TEST_F(TempDir, SuiteAllPasses)
{
    const auto r = run({"suite", "--name", "all"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir_ / "suite-all.jsonl"));
}

#ifdef YORKL_BINARY
int exit_status(const std::string& args)
{
    const std::string cmd = std::string(YORKL_BINARY) + " " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

TEST(CliBinary, ExitStatuses)
{
    EXPECT_EQ(exit_status("eval --target poly_eval --n 3 --x 2"), 0);
    EXPECT_EQ(exit_status("eval --target yor_direct --r 1 --t 0.05"), 2);
    EXPECT_EQ(exit_status("crosscheck --name squared_norm --t 2"), 1);
    EXPECT_EQ(exit_status("table --target yor --r 5:1:3 --t 1"), 2);
}
#endif

} // namespace
