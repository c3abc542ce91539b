#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result
{
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "hpsogwo");
    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = hpsogwo::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t line_count(const fs::path &p)
{
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);)
        ++n;
    return n;
}

class TempDir : public ::testing::Test
{
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() /
              ("hpsogwo-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    fs::path dir;
};

} // namespace

TEST(CliSchedule, Smoke)
{
    const Result r = cli({"schedule", "--algo", "hybrid", "--tasks", "100", "--vms", "4", "--seed", "7"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    for (const char *key : {"makespan_s", "throughput_tps", "cv", "boi", "fitness"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["tasks"], 100);
}

TEST(CliSchedule, Deterministic)
{
    const std::vector<std::string> args{"schedule", "--algo", "pso", "--tasks", "80", "--seed", "3"};
    EXPECT_EQ(cli(args).out, cli(args).out);
}

TEST(CliSchedule, UnknownAlgorithm)
{
    const Result r = cli({"schedule", "--algo", "nosuch"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("hybrid"), std::string::npos);
    EXPECT_NE(r.err.find("minmin"), std::string::npos);
}

TEST(CliSchedule, BadFlags)
{
    EXPECT_EQ(cli({"schedule", "--tasks", "abc"}).code, 2);
    EXPECT_EQ(cli({"schedule", "--bogus"}).code, 2);
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"schedule", "--swarm", "1"}).code, 2);
}

TEST(CliSchedule, MissingTraceIsRuntimeFailure)
{
    EXPECT_EQ(cli({"schedule", "--trace", "/nonexistent/t.csv"}).code, 1);
}

TEST_F(TempDir, ScheduleWritesConvergenceAndManifest)
{
    const auto conv = dir / "conv.csv";
    const auto manifest = dir / "manifest.json";
    const Result r = cli({"schedule", "--tasks", "50", "--iterations", "12", "--convergence-csv", conv.string(),
                          "--manifest", manifest.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(line_count(conv), 13u);
    const auto m = nlohmann::json::parse(slurp(manifest));
    EXPECT_EQ(m["config"]["max_iterations"], 12);
    EXPECT_EQ(m["config"]["v_max"], 40.0);
    EXPECT_EQ(m["version"], hpsogwo::cli::tool_version);

    // Replaying from the manifest reproduces the output.
    EXPECT_EQ(cli({"schedule", "--config", manifest.string()}).out, r.out);
}

TEST_F(TempDir, ConfigPrecedence)
{
    const auto cfg = dir / "cfg.json";
    std::ofstream(cfg) << R"({"tasks": 30, "vms": 3, "seed": 5})";
    const auto from_file = nlohmann::json::parse(cli({"schedule", "--config", cfg.string()}).out);
    EXPECT_EQ(from_file["tasks"], 30);
    EXPECT_EQ(from_file["vms"], 3);
    const auto flag_wins = nlohmann::json::parse(cli({"schedule", "--config", cfg.string(), "--tasks", "40"}).out);
    EXPECT_EQ(flag_wins["tasks"], 40);
    EXPECT_EQ(flag_wins["vms"], 3);

    std::ofstream(cfg) << R"({"taskz": 30})";
    EXPECT_EQ(cli({"schedule", "--config", cfg.string()}).code, 2);
    std::ofstream(cfg) << R"({"tasks": "many"})";
    EXPECT_EQ(cli({"schedule", "--config", cfg.string()}).code, 2);
    std::ofstream(cfg) << R"({"ordering": "sideways"})";
    EXPECT_EQ(cli({"schedule", "--config", cfg.string()}).code, 2);
}

TEST_F(TempDir, BenchOutputs)
{
    const auto out = dir / "nested" / "run";
    const Result r = cli({"bench", "--algos", "hybrid,pso,gwo,minmin,rr", "--tasks", "40", "--replicates", "3",
                          "--iterations", "5", "--swarm", "5", "--out", out.string(), "--no-wall-time"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(line_count(out / "raw.csv"), 1u + 5 * 3);
    for (const char *f : {"aggregates.json", "ttests.json", "manifest.json"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    EXPECT_TRUE(fs::exists(out / "convergence" / "hybrid_r0.csv"));
    EXPECT_TRUE(fs::exists(out / "convergence" / "gwo_r2.csv"));
    EXPECT_FALSE(fs::exists(out / "convergence" / "minmin_r0.csv"));

    const auto out2 = dir / "replay";
    ASSERT_EQ(cli({"bench", "--config", (out / "manifest.json").string(), "--out", out2.string()}).code, 0);
    EXPECT_EQ(slurp(out / "raw.csv"), slurp(out2 / "raw.csv"));
    EXPECT_EQ(slurp(out / "convergence" / "hybrid_r1.csv"), slurp(out2 / "convergence" / "hybrid_r1.csv"));
}

TEST_F(TempDir, BenchDefaultRowCount)
{
    // Default algorithms and replicates on a small instance.
    const Result r = cli({"bench", "--tasks", "20", "--iterations", "2", "--swarm", "3", "--out", dir.string(),
                          "--no-convergence"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(line_count(dir / "raw.csv"), 1u + 150);
    EXPECT_FALSE(fs::exists(dir / "convergence"));
}

TEST_F(TempDir, BenchSingleReplicate)
{
    ASSERT_EQ(cli({"bench", "--algos", "minmin,rr", "--tasks", "20", "--replicates", "1", "--out", dir.string()}).code, 0);
    const auto agg = nlohmann::json::parse(slurp(dir / "aggregates.json"));
    for (const auto &s : agg["schedulers"])
        EXPECT_EQ(s["makespan_s"]["std"], 0.0);
}

TEST_F(TempDir, BenchUnwritableOutput)
{
    const auto blocker = dir / "file";
    std::ofstream(blocker) << "x";
    EXPECT_EQ(cli({"bench", "--algos", "rr", "--tasks", "10", "--replicates", "2", "--out", (blocker / "sub").string()})
                  .code,
              1);
}

TEST_F(TempDir, Trace)
{
    const auto csv = dir / "trace.csv";
    {
        std::ofstream f(csv);
        f << "task_id,cpu_request,duration_s\n";
        for (int i = 0; i < 1000; ++i)
            f << "job-" << i << ",0.5," << (i + 1) << "\n";
    }
    const Result r = cli({"trace", "--input", csv.string(), "--limit", "800", "--export", (dir / "out.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["tasks"], 800);
    EXPECT_EQ(j["min_mi"], 500.0);
    EXPECT_EQ(j["max_mi"], 400000.0);
    EXPECT_EQ(line_count(dir / "out.csv"), 801u);

    EXPECT_EQ(cli({"trace", "--input", csv.string(), "--limit", "0"}).code, 2);
    EXPECT_EQ(cli({"trace", "--input", (dir / "missing.csv").string()}).code, 1);
}

TEST_F(TempDir, TraceMalformedRow)
{
    const auto csv = dir / "bad.csv";
    {
        std::ofstream f(csv);
        f << "task_id,cpu_request,duration_s\n";
        for (int i = 1; i <= 30; ++i)
            f << "job-" << i << (i == 17 ? ",oops,3\n" : ",0.5,3\n");
    }
    const Result r = cli({"trace", "--input", csv.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("row 17"), std::string::npos) << r.err;
}

TEST_F(TempDir, BenchOnTrace)
{
    const auto csv = dir / "trace.csv";
    {
        std::ofstream f(csv);
        f << "task_id,cpu_request,duration_s\n";
        for (int i = 0; i < 100; ++i)
            f << "job-" << i << ",0.25," << (i % 13 + 1) << "\n";
    }
    const Result r = cli({"bench", "--trace", csv.string(), "--limit", "60", "--algos", "minmin,rr,hybrid",
                          "--replicates", "2", "--iterations", "3", "--out", (dir / "o").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(line_count(dir / "o" / "raw.csv"), 7u);
}
