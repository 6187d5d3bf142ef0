#include "openarms/cornell_data.hpp"
#include "openarms/ggrcnn/weights.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdio>
#include <sys/wait.h>

using nlohmann::json;

namespace {

const std::string kFixture = OPENARMS_FIXTURE_DIR "/cornell_mini";

struct CliRun {
    int code;
    std::string out;
};

CliRun run(const std::string& args) {
    const std::string cmd = std::string(OPENARMS_CLI) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return {-1, ""};
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST(Cli, ForwardKinematics) {
    const CliRun r = run("fk --joints '0 0 0 0 0 0 0'");
    ASSERT_EQ(r.code, 0) << r.out;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["position"][2].get<double>(), -0.63, 1e-12);
    EXPECT_NE(run("fk --joints '0 0 0'").code, 0);
}

TEST(Cli, InverseKinematics) {
    const CliRun r = run("ik --pose '0.2 0.1 -0.5 1 0 0 0'");
    ASSERT_EQ(r.code, 0) << r.out;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["joints"].size(), 7u);
    EXPECT_TRUE(j["status"] == "Exact" || j["status"] == "BestFit");
    const CliRun bad = run("ik --pose '0 0 0 0 0 0 0'");
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.out.find("error:"), std::string::npos);
}

TEST(Cli, BenchWritesCsv) {
    const auto dir = testing_support::scratch_dir("cli_bench");
    const std::string csv = (dir / "bench.csv").string();
    const CliRun r = run("bench --cases 50 --seed 3 --threads 1 --out " + csv);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("two_stage"), std::string::npos);
    const std::string text = openarms::read_text_file(csv);
    EXPECT_EQ(text.rfind("config,n_cases", 0), 0u);
}

TEST(Cli, ChainExportLoadsBack) {
    const auto dir = testing_support::scratch_dir("cli_chain");
    const std::string path = (dir / "arm.chain").string();
    ASSERT_EQ(run("chain --out " + path).code, 0);
    const CliRun r = run("--chain " + path + " fk --joints '0 0 0 0 0 0 0'");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NEAR(json::parse(r.out)["position"][2].get<double>(), -0.63, 1e-12);
}

TEST(Cli, EvalOnFixture) {
    const CliRun r = run("eval --dataset " + kFixture + " --split ow --folds 5");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("accuracy"), std::string::npos);
    EXPECT_NE(r.out.find("/20 scenes"), std::string::npos);
    EXPECT_NE(run("eval --dataset " + kFixture + " --split xx").code, 0);
}

TEST(Cli, AugmentOnFixture) {
    const auto dir = testing_support::scratch_dir("cli_aug");
    const CliRun r = run("augment --dataset " + kFixture + " --out " + dir.string() + " --per-record 2 --seed 5");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto ds = openarms::load_dataset((dir / "aug").string(), false);
    EXPECT_EQ(ds.records.size(), 40u);
    EXPECT_TRUE(std::filesystem::exists(dir / "aug" / "pcd0100_aug001transform.json"));
}

TEST(Cli, GraspDetect) {
    const auto dir = testing_support::scratch_dir("cli_detect");
    const std::string rects = (dir / "out.txt").string();
    const CliRun r = run("grasp-detect --heuristic --depth " + kFixture + "/pcd0104d.pgm --k 3 --out " + rects);
    ASSERT_EQ(r.code, 0) << r.out;
    const auto n = openarms::parse_rect_file(openarms::read_text_file(rects)).rects.size();
    EXPECT_GE(n, 1u);
    EXPECT_LE(n, 3u);
    EXPECT_NE(run("grasp-detect --depth " + kFixture + "/pcd0104d.pgm").code, 0);
    EXPECT_NE(run("grasp-detect --heuristic --weights x --depth " + kFixture + "/pcd0104d.pgm").code, 0);
}

TEST(Cli, InitWeightsWritesLoadableFile) {
    const auto dir = testing_support::scratch_dir("cli_weights");
    const std::string path = (dir / "w.ggrw").string();
    ASSERT_EQ(run("init-weights --zero --out " + path).code, 0);
    const auto w = openarms::ggrcnn::load_weights(path);
    EXPECT_TRUE(w.contains("enc1.weight"));
    EXPECT_TRUE(w.contains("head_width.bias"));
}
