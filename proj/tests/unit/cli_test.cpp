#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cefrsimp/io.hpp"
#include "cefrsimp_cli/cli.hpp"

namespace cefrsimp {
namespace {

namespace fs = std::filesystem;

const std::string kFixtures = CEFRSIMP_FIXTURE_DIR;

struct Invocation {
    int code = -1;
    std::string out;
    std::string err;
};

Invocation cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Invocation r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("cefrsimp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

TEST_F(CliTest, SimplifyRuleModeMatchesGolden) {
    const auto r = cli({"simplify", "--input", kFixtures + "/tasks3.jsonl", "--output", path("out.jsonl"),
                        "--mode", "mrs-rule", "--scorers", "builtin", "--workers", "2", "--report",
                        path("report.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(path("out.jsonl")), slurp(kFixtures + "/golden/tasks3_mrs-rule.jsonl"));
    EXPECT_EQ(slurp(path("report.json")), slurp(kFixtures + "/golden/tasks3_mrs-rule.report.json"));
    EXPECT_NE(r.out.find("llm_calls\t0\n"), std::string::npos);
}

TEST_F(CliTest, SimplifyJointWithFixtureLlm) {
    const auto r = cli({"simplify", "--input", kFixtures + "/tasks3.jsonl", "--output", path("out.jsonl"),
                        "--mode", "mrs-joint", "--llm-fixture", kFixtures + "/tasks3_llm.jsonl",
                        "--report", path("report.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = nlohmann::json::parse(slurp(path("report.json")));
    EXPECT_EQ(report["llm_calls"], 3);
    EXPECT_NE(r.out.find("llm_calls\t3\n"), std::string::npos);
    EXPECT_EQ(slurp(path("out.jsonl")), slurp(kFixtures + "/golden/tasks3_mrs-joint.jsonl"));
    const auto outs = read_outputs(path("out.jsonl"));
    ASSERT_EQ(outs.size(), 3u);
    EXPECT_EQ(outs[0].text_id, "01-a1");
    EXPECT_EQ(outs[1].text_id, "01-b1");
    EXPECT_EQ(outs[2].text_id, "02-a2");
}

TEST_F(CliTest, SimplifyBaselineWithFixtureLlm) {
    const auto r = cli({"simplify", "--input", kFixtures + "/tasks3.jsonl", "--output", path("out.jsonl"),
                        "--mode", "baseline", "--llm", "fixture", "--llm-fixture",
                        kFixtures + "/tasks3_llm.jsonl"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto outs = read_outputs(path("out.jsonl"));
    ASSERT_EQ(outs.size(), 3u);
    EXPECT_EQ(outs[0].simplified_sentence, "Exercise helps old people remember things better.");
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
    for (const std::string workers : {"1", "3"}) {
        for (int i = 0; i < 2; ++i) {
            const auto n = workers + "_" + std::to_string(i);
            const auto r = cli({"simplify", "--input", kFixtures + "/tasks3.jsonl", "--output",
                                path("o" + n), "--mode", "mrs-joint", "--llm-fixture",
                                kFixtures + "/tasks3_llm.jsonl", "--workers", workers, "--report",
                                path("r" + n)});
            ASSERT_EQ(r.code, 0) << r.err;
        }
    }
    EXPECT_EQ(slurp(path("o1_0")), slurp(path("o1_1")));
    EXPECT_EQ(slurp(path("o1_0")), slurp(path("o3_1")));
    EXPECT_EQ(slurp(path("r1_0")), slurp(path("r3_0")));
}

TEST_F(CliTest, UsageErrors) {
    auto r = cli({"simplify", "--output", path("out.jsonl")});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_NE(r.err.find("--input"), std::string::npos);
    EXPECT_FALSE(fs::exists(path("out.jsonl")));

    EXPECT_EQ(cli({}).code, cli::kExitUsage);
    EXPECT_EQ(cli({"simplify", "--input", "x", "--output", "y", "--mode", "fast"}).code, cli::kExitUsage);
    EXPECT_EQ(cli({"simplify", "--input", kFixtures + "/tasks3.jsonl", "--output", path("o"), "--mode",
                   "baseline", "--llm", "fixture"})
                  .code,
              cli::kExitUsage);
    EXPECT_EQ(cli({"predict-level", "--text", "   "}).code, cli::kExitUsage);
    EXPECT_EQ(cli({"--help"}).code, cli::kExitOk);
}

TEST_F(CliTest, RuntimeErrorsExitOne) {
    auto r = cli({"simplify", "--input", path("missing.jsonl"), "--output", path("out.jsonl")});
    EXPECT_EQ(r.code, cli::kExitFailure);
    EXPECT_NE(r.err.find("cannot open"), std::string::npos);

    // Joint mode without an LLM backend is a configuration error.
    r = cli({"simplify", "--input", kFixtures + "/tasks3.jsonl", "--output", path("out.jsonl"), "--mode",
             "mrs-joint"});
    EXPECT_EQ(r.code, cli::kExitFailure);

    std::ofstream(path("cfg.json")) << R"({"max_retries": 0})";
    r = cli({"--config", path("cfg.json"), "simplify", "--input", kFixtures + "/tasks3.jsonl", "--output",
             path("out.jsonl")});
    EXPECT_EQ(r.code, cli::kExitFailure);
}

TEST_F(CliTest, ConfigFileChangesSchedule) {
    std::ofstream(path("cfg.json")) << R"({"max_retries": 2, "similarity_floor": 0.9})";
    const auto r = cli({"--config", path("cfg.json"), "simplify", "--input", kFixtures + "/tasks3.jsonl",
                        "--output", path("out.jsonl"), "--report", path("report.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = nlohmann::json::parse(slurp(path("report.json")));
    EXPECT_EQ(report["retry_floors"], nlohmann::json({0.9, 0.87}));
    EXPECT_EQ(report["per_retry_hits"].size(), 2u);
}

TEST_F(CliTest, EvaluatePerfectPredictions) {
    {
        std::ofstream t(path("tasks.jsonl"));
        t << R"({"text_id": "a", "original": "I like dogs.", "target_cefr": "A1"})" << "\n";
        std::ofstream o(path("outs.jsonl"));
        o << R"({"text_id": "a", "simplified_sentence": "I like dogs."})" << "\n";
    }
    const auto r = cli({"evaluate", "--input", path("tasks.jsonl"), "--outputs", path("outs.jsonl")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.starts_with("n\trmse\tsim-orig (proxy)\tsim-ref (proxy)\n1\t0.0000\t1.0000\t-\n"))
        << r.out;
}

TEST_F(CliTest, EvaluateConfusionFixture) {
    const auto r = cli({"evaluate", "--input", kFixtures + "/confusion_tasks.jsonl", "--outputs",
                        kFixtures + "/confusion_outputs.jsonl", "--predictor", "fixture",
                        "--predictor-fixture", kFixtures + "/confusion_votes.jsonl", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["n"], 100);
    EXPECT_EQ(j["confusion"]["B1"]["A2"], 20);
    EXPECT_EQ(j["confusion"]["B1"]["B1"], 79);
    EXPECT_EQ(j["confusion"]["B1"]["B2"], 1);
}

TEST_F(CliTest, EvaluateWithRunReportAddsCurve) {
    ASSERT_EQ(cli({"simplify", "--input", kFixtures + "/tasks3.jsonl", "--output", path("out.jsonl"),
                   "--report", path("report.json")})
                  .code,
              0);
    const auto r = cli({"evaluate", "--input", kFixtures + "/tasks3.jsonl", "--outputs", path("out.jsonl"),
                        "--report", path("report.json"), "--output", path("eval.tsv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    EXPECT_NE(slurp(path("eval.tsv")).find("retry\thits\n1\t"), std::string::npos);
}

TEST_F(CliTest, EvaluateRejectsDisjointIds) {
    {
        std::ofstream o(path("outs.jsonl"));
        o << R"({"text_id": "zzz", "simplified_sentence": "x"})" << "\n";
    }
    const auto r = cli({"evaluate", "--input", kFixtures + "/tasks3.jsonl", "--outputs", path("outs.jsonl")});
    EXPECT_EQ(r.code, cli::kExitFailure);
    EXPECT_NE(r.err.find("missing: 02-a2 01-b1 01-a1; unexpected: zzz"), std::string::npos) << r.err;
}

TEST_F(CliTest, GapAnalysisGroupSizeFixture) {
    const auto r = cli({"gap-analysis", "--input", kFixtures + "/gapgroups_tasks.jsonl", "--outputs",
                        kFixtures + "/gapgroups_outputs.jsonl", "--predictor", "fixture",
                        "--predictor-fixture", kFixtures + "/gapgroups_votes.jsonl"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string header, g1, g2, g3, extra;
    std::getline(lines, header);
    std::getline(lines, g1);
    std::getline(lines, g2);
    std::getline(lines, g3);
    EXPECT_FALSE(std::getline(lines, extra));
    EXPECT_EQ(header, "gap\tn\trmse\tsim-orig (proxy)\tsim-ref (proxy)");
    EXPECT_TRUE(g1.starts_with("1\t18\t0.3333\t"));
    EXPECT_TRUE(g2.starts_with("2\t18\t0.5774\t"));
    EXPECT_TRUE(g3.starts_with("3\t4\t1.2247\t"));
}

TEST_F(CliTest, GapAnalysisSingleGapAndEmpty) {
    {
        std::ofstream t(path("tasks.jsonl"));
        t << R"({"text_id": "a", "original": "I like dogs.", "target_cefr": "A1"})" << "\n";
        t << R"({"text_id": "b", "original": "We eat fish.", "target_cefr": "A1"})" << "\n";
        std::ofstream o(path("outs.jsonl"));
        o << R"({"text_id": "b", "simplified_sentence": "Fish."})" << "\n";
        o << R"({"text_id": "a", "simplified_sentence": "Dogs."})" << "\n";
        std::ofstream(path("empty_tasks.jsonl"));
        std::ofstream(path("empty_outs.jsonl"));
    }
    auto r = cli({"gap-analysis", "--input", path("tasks.jsonl"), "--outputs", path("outs.jsonl"), "--format",
                  "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = nlohmann::json::parse(r.out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0]["gap"], 0);
    EXPECT_EQ(rows[0]["n"], 2);

    r = cli({"gap-analysis", "--input", path("empty_tasks.jsonl"), "--outputs", path("empty_outs.jsonl")});
    EXPECT_EQ(r.code, cli::kExitFailure);
}

TEST_F(CliTest, PredictLevelBuiltinGolden) {
    const auto r = cli({"predict-level", "--text",
                        "The company announced that it would open a new office in the city next year."});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, slurp(kFixtures + "/golden/predict_level.tsv"));
    EXPECT_TRUE(r.out.ends_with("resolved\tB1\n"));
}

TEST_F(CliTest, PredictLevelFixtureUnanimity) {
    std::ofstream(path("votes.jsonl")) << R"({"text": "Hello.", "label": "C1", "confidence": 0.4})" << "\n";
    std::ofstream(path("text.txt")) << "Hello.\n";
    const auto r = cli({"predict-level", "--input", path("text.txt"), "--predictor", "fixture",
                        "--predictor-fixture", path("votes.jsonl")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out,
              "fixture-1\tC1\t0.4000\nfixture-2\tC1\t0.4000\nfixture-3\tC1\t0.4000\nresolved\tC1\n");
}

TEST_F(CliTest, PredictLevelUnavailableBackend) {
    const auto r = cli({"predict-level", "--text", "Hi.", "--predictor", "fixture", "--predictor-fixture",
                        path("missing.jsonl")});
    EXPECT_NE(r.code, 0);
    std::ofstream(path("votes.jsonl")) << R"({"text": "Other.", "label": "C1", "confidence": 0.4})" << "\n";
    const auto r2 = cli({"predict-level", "--text", "Hi.", "--predictor", "fixture", "--predictor-fixture",
                         path("votes.jsonl")});
    EXPECT_EQ(r2.code, cli::kExitFailure);
}

}  // namespace
}  // namespace cefrsimp
