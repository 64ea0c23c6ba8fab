#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace opinionrank::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
    int status;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "opinionrank");
    std::ostringstream out, err;
    const int status = run(args, out, err);
    return {status, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("opinionrank_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    fs::path file(const std::string& name, const std::string& body) const {
        const auto path = dir_ / name;
        std::ofstream(path) << body;
        return path;
    }

    static std::string slurp(const fs::path& path) {
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
};

TEST_F(CliTest, AggregateUnanimousFile) {
    const auto input = file("votes.csv", "id,a,b,c\nx,duck,duck,duck\ny,goose,goose,goose\nz,duck,duck,duck\n");
    const auto r = invoke({"aggregate", input.string(), "--out-dir", (dir_ / "out").string()});
    ASSERT_EQ(r.status, kExitOk) << r.err;
    EXPECT_EQ(slurp(dir_ / "out" / "predictions.csv"), "instance,label\nx,duck\ny,goose\nz,duck\n");
    EXPECT_TRUE(fs::exists(dir_ / "out" / "scores.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "out" / "rankings.csv"));
}

TEST_F(CliTest, AggregateRaggedRowIsRuntimeError) {
    const auto input = file("bad.csv", "id,a,b\nx,duck,duck\ny,duck\n");
    const auto r = invoke({"aggregate", input.string(), "--out-dir", dir_.string()});
    EXPECT_EQ(r.status, kExitRuntime);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(CliTest, AggregateTopNZeroIsUsageError) {
    const auto input = file("votes.csv", "id,a,b\nx,duck,goose\n");
    EXPECT_EQ(invoke({"aggregate", input.string(), "--top-n", "0"}).status, kExitUsage);
}

TEST_F(CliTest, AggregateTopNAboveSourcesIsUsageError) {
    const auto input = file("votes.csv", "id,a,b\nx,duck,goose\n");
    EXPECT_EQ(invoke({"aggregate", input.string(), "--top-n", "3", "--out-dir", dir_.string()}).status, kExitUsage);
}

TEST_F(CliTest, AggregateBinaryTaskOnThreeClassesIsUsageError) {
    const auto input = file("votes.csv", "id,a,b\nx,duck,goose\ny,swan,duck\n");
    EXPECT_EQ(invoke({"aggregate", input.string(), "--task", "binary", "--out-dir", dir_.string()}).status,
              kExitUsage);
}

TEST_F(CliTest, AggregateMissingInputIsRuntimeError) {
    EXPECT_EQ(invoke({"aggregate", (dir_ / "nope.csv").string(), "--out-dir", dir_.string()}).status, kExitRuntime);
}

TEST_F(CliTest, AggregateWithBaselinesAndTruth) {
    const auto input = file("votes.csv", "id,a,b,c\nx,duck,duck,goose\ny,goose,goose,goose\nz,duck,goose,duck\n");
    const auto truth = file("truth.csv", "instance,label\nz,duck\nx,duck\ny,goose\n");
    const auto r = invoke({"aggregate", input.string(), "--baselines", "--truth", truth.string(), "--out-dir",
                           (dir_ / "out").string()});
    ASSERT_EQ(r.status, kExitOk) << r.err;
    EXPECT_TRUE(fs::exists(dir_ / "out" / "predictions_majority.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "out" / "predictions_dawid-skene.csv"));
    EXPECT_NE(r.out.find("accuracy opinionrank"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("1.000000"), std::string::npos) << r.out;
}

TEST_F(CliTest, AggregateUsesOutputDirEnvironment) {
    const auto input = file("votes.csv", "id,a,b\nx,duck,goose\ny,goose,goose\n");
    const auto target = dir_ / "from_env";
    ::setenv(kOutputDirEnv, target.string().c_str(), 1);
    const auto r = invoke({"aggregate", input.string()});
    ::unsetenv(kOutputDirEnv);
    ASSERT_EQ(r.status, kExitOk) << r.err;
    EXPECT_TRUE(fs::exists(target / "predictions.csv"));
}

TEST_F(CliTest, UnknownSubcommandOrFlagIsUsageError) {
    EXPECT_EQ(invoke({"frobnicate"}).status, kExitUsage);
    EXPECT_EQ(invoke({}).status, kExitUsage);
    EXPECT_EQ(invoke({"score", "--bogus"}).status, kExitUsage);
}

TEST_F(CliTest, HelpExitsZero) {
    const auto r = invoke({"--help"});
    EXPECT_EQ(r.status, kExitOk);
    EXPECT_NE(r.out.find("aggregate"), std::string::npos);
}

TEST_F(CliTest, SimulateUnknownExperimentIsUsageError) {
    EXPECT_EQ(invoke({"simulate", "glad", "--out-dir", dir_.string()}).status, kExitUsage);
}

TEST_F(CliTest, SimulateNBadOutsideDifficultyIsUsageError) {
    EXPECT_EQ(invoke({"simulate", "welinder", "--n-bad", "2", "--out-dir", dir_.string()}).status, kExitUsage);
}

TEST_F(CliTest, SimulateIsByteReproducible) {
    const std::vector<std::string> base{"simulate", "goldberger", "--trials", "5", "--sources", "5,7", "--seed", "3"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out-dir", (dir_ / "a").string()});
    b.insert(b.end(), {"--out-dir", (dir_ / "b").string()});
    const auto ra = invoke(a);
    const auto rb = invoke(b);
    ASSERT_EQ(ra.status, kExitOk) << ra.err;
    ASSERT_EQ(rb.status, kExitOk) << rb.err;
    const auto ja = slurp(dir_ / "a" / "simulate_goldberger.json");
    EXPECT_FALSE(ja.empty());
    EXPECT_EQ(ja, slurp(dir_ / "b" / "simulate_goldberger.json"));
    EXPECT_NE(ra.out.find("method"), std::string::npos);
    EXPECT_NE(ra.out.find("stderr"), std::string::npos);
}

TEST_F(CliTest, SimulateDifficultyShowsPublishedFigures) {
    const auto r = invoke({"simulate", "whitehill-difficulty", "--trials", "2", "--instances", "100", "--out-dir",
                           dir_.string()});
    ASSERT_EQ(r.status, kExitOk) << r.err;
    EXPECT_NE(r.out.find("published"), std::string::npos);
    EXPECT_NE(r.out.find("opinionrank"), std::string::npos);
}

TEST_F(CliTest, ScoreIdentity) {
    const auto truth = file("truth.csv", "instance,label\na,x\nb,y\n");
    const auto r = invoke({"score", "--predictions", truth.string(), "--truth", truth.string(), "--out-dir",
                           dir_.string()});
    ASSERT_EQ(r.status, kExitOk) << r.err;
    EXPECT_NE(r.out.find("accuracy 1 (2/2)"), std::string::npos) << r.out;
    EXPECT_TRUE(fs::exists(dir_ / "score.json"));
}

TEST_F(CliTest, ScoreHalfCorrect) {
    const auto pred = file("pred.csv", "instance,label\na,x\nb,y\nc,x\nd,y\n");
    const auto truth = file("truth.csv", "instance,label\nd,x\nc,x\nb,y\na,y\n");
    const auto r = invoke({"score", "--predictions", pred.string(), "--truth", truth.string(), "--out-dir",
                           dir_.string()});
    ASSERT_EQ(r.status, kExitOk) << r.err;
    EXPECT_NE(r.out.find("accuracy 0.5 (2/4)"), std::string::npos) << r.out;
}

TEST_F(CliTest, ScoreMismatchedIdsIsRuntimeError) {
    const auto pred = file("pred.csv", "instance,label\na,x\nq,y\n");
    const auto truth = file("truth.csv", "instance,label\na,x\nb,y\n");
    const auto r = invoke({"score", "--predictions", pred.string(), "--truth", truth.string(), "--out-dir",
                           dir_.string()});
    EXPECT_EQ(r.status, kExitRuntime);
    EXPECT_NE(r.err.find("b"), std::string::npos);
    EXPECT_NE(r.err.find("q"), std::string::npos);
}

TEST_F(CliTest, ScoreRequiresBothFiles) { EXPECT_EQ(invoke({"score", "--truth", "t.csv"}).status, kExitUsage); }

TEST_F(CliTest, BenchWritesCsv) {
    const auto r = invoke({"bench", "--sources", "2,4", "--instances", "10,20", "--repetitions", "2", "--out-dir",
                           dir_.string()});
    ASSERT_EQ(r.status, kExitOk) << r.err;
    std::ifstream in(dir_ / "bench.csv");
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    EXPECT_EQ(lines, 1u + 4u);
}

TEST_F(CliTest, BenchZeroRepetitionsIsUsageError) {
    EXPECT_EQ(invoke({"bench", "--repetitions", "0"}).status, kExitUsage);
}

}  // namespace
}  // namespace opinionrank::cli
