#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <sparse_phase/cli.hpp>
#include <sparse_phase/io.hpp>

#include "test_helpers.hpp"

using namespace sparse_phase;
namespace fs = std::filesystem;

namespace
{

struct Outcome
{
    int code = -1;
    std::string out;
    std::string err;
};

Outcome invoke(const std::vector<std::string>& args)
{
    std::vector<const char*> argv{"sparse_phase"};
    for (const auto& a : args)
    {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    Outcome o;
    o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::size_t line_count(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class CliTest : public ::testing::Test
{
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() /
               (std::string("sparse_phase_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    void TearDown() override
    {
        fs::remove_all(dir_);
    }

    std::string path(const std::string& name) const
    {
        return (dir_ / name).string();
    }

    std::string write(const std::string& name, const std::string& text) const
    {
        io::write_text(path(name), text);
        return path(name);
    }

    fs::path dir_;
};

} // namespace

TEST_F(CliTest, SynthFirstSampleIsModulusOfSum)
{
    const auto out = path("m.csv");
    const auto o = invoke({"synth", "--signal",
                           test_support::data_path("table1_spikes.json"),
                           "--step", "0.029", "--count", "5", "--out", out});
    ASSERT_EQ(o.code, cli::exit_ok) << o.err;
    const auto samples = io::read_measurements(out);
    ASSERT_EQ(samples.size(), 5U);
    EXPECT_NEAR(samples.step, 0.029, 1e-15);
    Complex sum(0.0, 0.0);
    for (const auto& c : test_support::table1().coefficients)
    {
        sum += c;
    }
    EXPECT_NEAR(samples.values[0], std::abs(sum), 1e-12);
}

TEST_F(CliTest, SynthSingleSpikeToStdout)
{
    const auto sig = write("s.json", R"({"type": "spikes", "knots": [1.5],
                                         "coefficients": [[0.0, 2.0]]})");
    const auto o = invoke({"synth", "--signal", sig, "--step", "0.5",
                           "--count", "3", "--out", "-"});
    ASSERT_EQ(o.code, cli::exit_ok) << o.err;
    const auto samples = io::measurements_from_csv(o.out, "stdout");
    for (double v : samples.values)
    {
        EXPECT_NEAR(v, 2.0, 1e-15);
    }
}

TEST_F(CliTest, SynthIsDeterministic)
{
    const std::vector<std::string> base{
        "synth", "--signal", test_support::data_path("table2_spline.json"),
        "--step", "0.085", "--count", "50", "--out"};
    auto a = base;
    a.push_back(path("a.csv"));
    auto b = base;
    b.push_back(path("b.csv"));
    ASSERT_EQ(invoke(a).code, cli::exit_ok);
    ASSERT_EQ(invoke(b).code, cli::exit_ok);
    EXPECT_EQ(io::read_text(path("a.csv")), io::read_text(path("b.csv")));
}

TEST_F(CliTest, MissingInputIsIoError)
{
    const auto missing = path("nope.json");
    const auto o = invoke({"synth", "--signal", missing, "--step", "0.5",
                           "--count", "3", "--out", "-"});
    EXPECT_EQ(o.code, cli::exit_io);
    EXPECT_EQ(line_count(o.err), 1U);
    EXPECT_NE(o.err.find(missing), std::string::npos);
}

TEST_F(CliTest, InvalidSignalIsInvalidInput)
{
    const auto sig = write("s.json", R"({"type": "spikes", "knots": [1.0, 0.0],
                                         "coefficients": [1.0, 1.0]})");
    const auto o = invoke({"synth", "--signal", sig, "--step", "0.5",
                           "--count", "3", "--out", "-"});
    EXPECT_EQ(o.code, cli::exit_invalid);
    EXPECT_EQ(line_count(o.err), 1U);
}

TEST_F(CliTest, RecoverRejectsTooFewSamples)
{
    const auto sig = write("s.json", R"({"type": "spikes", "knots": [0.0, 1.0],
                                         "coefficients": [1.0, 2.0]})");
    ASSERT_EQ(invoke({"synth", "--signal", sig, "--step", "0.5", "--count",
                      "10", "--out", path("m.csv")})
                  .code,
              cli::exit_ok);
    const auto o = invoke({"recover", "--measurements", path("m.csv"),
                           "--bound", "10", "--out", "-"});
    EXPECT_EQ(o.code, cli::exit_invalid);
    EXPECT_EQ(line_count(o.err), 1U);
    EXPECT_NE(o.err.find("precondition"), std::string::npos);
}

TEST_F(CliTest, RecoverPipelineFailure)
{
    // Equal endpoint moduli on an asymmetric support cannot be resolved.
    const auto sig = write("s.json", R"({"type": "spikes",
                                         "knots": [0.0, 1.0, 3.0, 7.0],
                                         "coefficients": [1.0, 1.0, 1.0, 1.0]})");
    ASSERT_EQ(invoke({"synth", "--signal", sig, "--step", "0.3", "--count",
                      "201", "--out", path("m.csv")})
                  .code,
              cli::exit_ok);
    const auto o = invoke({"recover", "--measurements", path("m.csv"),
                           "--bound", "5", "--out", "-"});
    EXPECT_EQ(o.code, cli::exit_pipeline);
    EXPECT_EQ(line_count(o.err), 1U);
    EXPECT_NE(o.err.find("stage support"), std::string::npos);
}

TEST_F(CliTest, EvalBoxSpline)
{
    const auto sig = write("box.json", R"({"type": "spline", "order": 1,
                                           "knots": [0.0, 1.0],
                                           "coefficients": [1.0]})");
    const auto o = invoke({"eval", "--signal", sig, "--from", "-1", "--to",
                           "2", "--points", "4", "--out", "-"});
    ASSERT_EQ(o.code, cli::exit_ok) << o.err;
    EXPECT_EQ(o.out, "t,re,im\n-1,0,0\n0,1,0\n1,0,0\n2,0,0\n");
}

TEST_F(CliTest, EvalSpikesMarksKnots)
{
    const auto sig = write("s.json", R"({"type": "spikes", "knots": [0.5],
                                         "coefficients": [[1.0, -2.0]]})");
    const auto o = invoke({"eval", "--signal", sig, "--from", "0", "--to",
                           "1", "--points", "2", "--out", "-"});
    ASSERT_EQ(o.code, cli::exit_ok) << o.err;
    EXPECT_EQ(o.out, "t,re,im,is_knot\n0,0,0,0\n0.5,1,-2,1\n1,0,0,0\n");
}

TEST_F(CliTest, EvalUsageErrors)
{
    const auto sig = test_support::data_path("table2_spline.json");
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"eval", "--from", "0", "--to", "1", "--points", "2", "--out",
              "-"},
             {"eval", "--signal", sig, "--report", sig, "--from", "0", "--to",
              "1", "--points", "2", "--out", "-"},
             {"eval", "--signal", sig, "--from", "1", "--to", "0", "--points",
              "2", "--out", "-"},
             {"eval", "--signal", sig, "--from", "0", "--to", "1", "--points",
              "1", "--out", "-"}})
    {
        const auto o = invoke(args);
        EXPECT_EQ(o.code, cli::exit_invalid);
        EXPECT_EQ(line_count(o.err), 1U) << o.err;
    }
}

TEST_F(CliTest, CompareDetectsTrivialAmbiguities)
{
    const auto t1 = test_support::table1();
    io::write_signal(path("ref.json"), Signal(t1));
    io::write_signal(path("moved.json"),
                     Signal(retrieval::reflect(
                         retrieval::rotate_shift(t1, 0.7, 12.5))));
    auto scaled = t1;
    for (auto& c : scaled.coefficients)
    {
        c *= 1.5;
    }
    io::write_signal(path("scaled.json"), Signal(scaled));

    auto o = invoke({"compare", "--ref", path("ref.json"), "--rec",
                     path("ref.json"), "--tol", "1e-12"});
    EXPECT_EQ(o.code, cli::exit_ok);
    EXPECT_NE(o.out.find("equivalent true"), std::string::npos);

    o = invoke({"compare", "--ref", path("ref.json"), "--rec",
                path("moved.json"), "--tol", "1e-9"});
    EXPECT_EQ(o.code, cli::exit_ok) << o.out;

    o = invoke({"compare", "--ref", path("ref.json"), "--rec",
                path("scaled.json"), "--tol", "1e-3"});
    EXPECT_EQ(o.code, cli::exit_mismatch);
    EXPECT_NE(o.out.find("equivalent false"), std::string::npos);

    o = invoke({"compare", "--ref", path("ref.json"), "--rec",
                test_support::data_path("table2_spline.json"), "--tol", "1"});
    EXPECT_EQ(o.code, cli::exit_invalid);
    EXPECT_EQ(line_count(o.err), 1U);
}

TEST_F(CliTest, RoundTrip)
{
    std::mt19937 rng(131);
    for (int seed = 0; seed < 20; ++seed)
    {
        const std::size_t n = 2 + static_cast<std::size_t>(seed) % 5;
        const auto truth = test_support::random_spikes(rng, n, 0.5);
        io::write_signal(path("truth.json"), Signal(truth));
        const double h =
            0.9 * std::numbers::pi / (truth.knots.back() - truth.knots.front());
        const std::size_t bound = n + 1;
        const std::size_t count = 2 * bound * (bound - 1) + 41;
        ASSERT_EQ(invoke({"synth", "--signal", path("truth.json"), "--step",
                          io::format_real(h), "--count", std::to_string(count),
                          "--out", path("m.csv")})
                      .code,
                  cli::exit_ok);
        const auto rec = invoke({"recover", "--measurements", path("m.csv"),
                                 "--bound", std::to_string(bound), "--out",
                                 path("report.json")});
        ASSERT_EQ(rec.code, cli::exit_ok) << rec.err;
        const auto cmp = invoke({"compare", "--ref", path("truth.json"),
                                 "--rec", path("report.json"), "--tol", "1e-5"});
        EXPECT_EQ(cmp.code, cli::exit_ok) << "n = " << n << "\n" << cmp.out;
    }
}

TEST_F(CliTest, ReportRoundTripsThroughEval)
{
    const auto sig = test_support::data_path("table2_spline.json");
    ASSERT_EQ(invoke({"synth", "--signal", sig, "--step", "0.085", "--count",
                      "601", "--out", path("m.csv")})
                  .code,
              cli::exit_ok);
    const auto rec =
        invoke({"recover", "--measurements", path("m.csv"), "--order", "3",
                "--bound", "14", "--eps2", "1e-10", "--out", path("r.json")});
    ASSERT_EQ(rec.code, cli::exit_ok) << rec.err;
    const auto o = invoke({"eval", "--report", path("r.json"), "--from", "0",
                           "--to", "1", "--points", "3", "--out", "-"});
    EXPECT_EQ(o.code, cli::exit_ok) << o.err;
    EXPECT_EQ(line_count(o.out), 4U);
}

TEST_F(CliTest, ParseErrorsAreSingleLine)
{
    for (const auto& args : std::vector<std::vector<std::string>>{
             {}, {"bogus"}, {"synth"}, {"synth", "--step", "x"},
             {"recover", "--measurements", "m.csv", "--out", "-"}})
    {
        const auto o = invoke(args);
        EXPECT_EQ(o.code, cli::exit_invalid);
        EXPECT_EQ(line_count(o.err), 1U) << o.err;
    }
}

TEST_F(CliTest, BinaryExitCodesAndStderr)
{
    const std::string bin = SPARSE_PHASE_CLI;
    const auto err = path("err.txt");
    const auto run = [&](const std::string& args) {
        const std::string cmd = "'" + bin + "' " + args + " > /dev/null 2> '" +
                                err + "'";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    EXPECT_EQ(run("synth --signal '" +
                  test_support::data_path("table1_spikes.json") +
                  "' --step 0.029 --count 3 --out -"),
              0);
    EXPECT_EQ(line_count(io::read_text(err)), 0U);
    EXPECT_EQ(run("synth --signal '" + path("missing.json") +
                  "' --step 0.029 --count 3 --out -"),
              3);
    EXPECT_EQ(line_count(io::read_text(err)), 1U);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(line_count(io::read_text(err)), 1U);
    EXPECT_EQ(run("--help"), 0);
}
