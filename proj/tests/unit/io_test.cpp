#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cefrsimp/errors.hpp"
#include "cefrsimp/io.hpp"
#include "cefrsimp/text.hpp"

namespace cefrsimp {
namespace {

std::vector<SimplificationTask> parse(const std::string& s) {
    std::istringstream in(s);
    return parse_tasks(in);
}

std::string error_of(const std::string& s) {
    try {
        parse(s);
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

TEST(ParseTasks, TwoLinesInOrder) {
    const auto ts = parse(
        R"({"text_id": "b", "original": "Second.", "target_cefr": "a2"})" "\n"
        "\n"
        R"({"text_id": "a", "original": "First.", "target_cefr": "C1", "reference": "Ref."})" "\n");
    ASSERT_EQ(ts.size(), 2u);
    EXPECT_EQ(ts[0].text_id, "b");
    EXPECT_EQ(ts[0].target, CefrLevel::kA2);
    EXPECT_FALSE(ts[0].reference);
    EXPECT_EQ(ts[1].reference, "Ref.");
    EXPECT_EQ(parse(R"({"text_id":"x","original":"y","target_cefr":"B1","reference":null})")[0].reference,
              std::nullopt);
}

TEST(ParseTasks, ErrorsNameTheLine) {
    EXPECT_EQ(error_of(R"({"text_id": "a", "original": "x"})"), "line 1: missing 'target_cefr'");
    EXPECT_EQ(error_of("\n" R"({"text_id": "a", "original": "x", "target_cefr": "D4"})"),
              "line 2: unknown CEFR label 'D4'");
    EXPECT_EQ(error_of(R"({"text_id": 5, "original": "x", "target_cefr": "A1"})"),
              "line 1: 'text_id' must be a string");
    EXPECT_EQ(error_of(R"({"text_id": "", "original": "x", "target_cefr": "A1"})"), "line 1: empty text_id");
    EXPECT_EQ(error_of(R"({"text_id": "a", "original": "  ", "target_cefr": "A1"})"), "line 1: empty original");
    EXPECT_EQ(error_of("[1, 2]"), "line 1: expected a JSON object");
    EXPECT_TRUE(error_of("{oops").starts_with("line 1: invalid JSON"));
    EXPECT_EQ(error_of(R"({"text_id": "a", "original": "x", "target_cefr": "A1"})" "\n"
                       R"({"text_id": "a", "original": "y", "target_cefr": "A1"})"),
              "line 2: duplicate text_id 'a'");
}

TEST(ReadTasks, MissingFileAndPathPrefix) {
    EXPECT_THROW(read_tasks("/nonexistent/tasks.jsonl"), InputError);
    const auto path = std::filesystem::temp_directory_path() / "cefrsimp_bad_tasks.jsonl";
    std::ofstream(path) << "{}\n";
    try {
        read_tasks(path);
        FAIL();
    } catch (const InputError& e) {
        EXPECT_EQ(std::string(e.what()), path.string() + " line 1: missing 'text_id'");
    }
    std::filesystem::remove(path);
}

TEST(SortOutputs, Examples) {
    const std::vector<OutputRecord> in{{"02-a2", "x"}, {"01-b1", "y"}, {"01-a1", "z"}};
    const auto out = sort_outputs(in);
    EXPECT_EQ(out[0].text_id, "01-a1");
    EXPECT_EQ(out[1].text_id, "01-b1");
    EXPECT_EQ(out[2].text_id, "02-a2");
    EXPECT_EQ(sort_outputs(out), out);
}

TEST(SortOutputs, PermutationsSortTheSameWay) {
    std::vector<OutputRecord> base;
    for (int i = 0; i < 30; ++i) base.push_back({"id-" + std::to_string(i * 7 % 30), "t"});
    const auto expected = sort_outputs(base);
    std::mt19937_64 rng(99);
    for (int k = 0; k < 50; ++k) {
        auto shuffled = base;
        for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng() % i]);
        EXPECT_EQ(sort_outputs(shuffled), expected);
    }
}

TEST(EmitOutputs, ExactlyTwoFieldsPerLine) {
    std::ostringstream out;
    const std::vector<OutputRecord> rs{{"a", "Line one.\nLine two."}, {"b", "Say \"hi\"."}};
    emit_outputs(out, rs);
    EXPECT_EQ(out.str(),
              "{\"text_id\": \"a\", \"simplified_sentence\": \"Line one. Line two.\"}\n"
              "{\"text_id\": \"b\", \"simplified_sentence\": \"Say \\\"hi\\\".\"}\n");
    std::istringstream in(out.str());
    std::string line;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j.size(), 2u);
        EXPECT_TRUE(j.contains("text_id"));
        EXPECT_TRUE(j.contains("simplified_sentence"));
    }
}

TEST(WriteOutputs, RoundTripAndEmpty) {
    const auto path = std::filesystem::temp_directory_path() / "cefrsimp_out.jsonl";
    const std::vector<OutputRecord> rs{{"01", "Caf\xC3\xA9 is open."}, {"02", "Tab\there."}};
    write_outputs(path, rs);
    EXPECT_EQ(read_outputs(path), rs);
    write_outputs(path, {});
    EXPECT_EQ(std::filesystem::file_size(path), 0u);
    std::filesystem::remove(path);
    EXPECT_THROW(write_outputs("/nonexistent/dir/out.jsonl", rs), std::filesystem::filesystem_error);
}

std::vector<SimplificationTask> five_tasks() {
    std::vector<SimplificationTask> ts;
    for (int i = 5; i >= 1; --i) {
        ts.push_back({"t" + std::to_string(i), "Original number " + std::to_string(i) + " is here",
                      CefrLevel::kA2, std::nullopt});
    }
    return ts;
}

TEST(CompletenessCheck, EqualSetsPassThroughSorted) {
    const auto ts = five_tasks();
    std::vector<OutputRecord> outs;
    for (const auto& t : ts) outs.push_back({t.text_id, "S " + t.text_id});
    int calls = 0;
    const auto got = completeness_check(ts, outs, [&](const SimplificationTask&) {
        ++calls;
        return std::string("never");
    });
    EXPECT_EQ(calls, 0);
    EXPECT_EQ(got, sort_outputs(outs));
}

TEST(CompletenessCheck, RepairsMissingAndDropsUnknown) {
    const auto ts = five_tasks();
    std::vector<OutputRecord> outs{{"t1", "one"}, {"t3", "three"}, {"ghost", "boo"}, {"t1", "dup"}};
    const auto got = completeness_check(ts, outs, [](const SimplificationTask&) { return std::string("X."); });
    ASSERT_EQ(got.size(), 5u);
    EXPECT_EQ(got[0], (OutputRecord{"t1", "one"}));
    EXPECT_EQ(got[1], (OutputRecord{"t2", "X."}));
    EXPECT_EQ(got[2], (OutputRecord{"t3", "three"}));
}

TEST(CompletenessCheck, FailingResolverFallsBackToTrimmedOriginal) {
    const auto ts = five_tasks();
    const auto got = completeness_check(ts, {}, [](const SimplificationTask&) -> std::string {
        throw std::runtime_error("resolver down");
    });
    ASSERT_EQ(got.size(), 5u);
    EXPECT_EQ(got[0], (OutputRecord{"t1", "Original number 1 is here."}));
    const auto empty = completeness_check(ts, {}, [](const SimplificationTask&) { return std::string(" "); });
    EXPECT_EQ(empty[4].simplified_sentence, "Original number 5 is here.");
    const auto null_resolver = completeness_check(ts, {}, nullptr);
    EXPECT_EQ(null_resolver.size(), 5u);
}

TEST(CompletenessCheck, RandomDeletionsAlwaysRestoreIdSet) {
    std::vector<SimplificationTask> ts;
    for (int i = 0; i < 60; ++i) {
        ts.push_back({"id" + std::to_string(i), "Some words for task " + std::to_string(i), CefrLevel::kB1, {}});
    }
    std::mt19937_64 rng(2026);
    for (int round = 0; round < 40; ++round) {
        std::vector<OutputRecord> outs;
        for (const auto& t : ts) {
            if (rng() % 4 != 0) outs.push_back({t.text_id, "kept"});
        }
        const auto got = completeness_check(ts, outs, [&](const SimplificationTask& t) -> std::string {
            if (rng() % 2) throw InputError("no");
            return "fixed " + t.text_id;
        });
        ASSERT_EQ(got.size(), ts.size());
        std::vector<std::string> ids;
        for (const auto& o : got) {
            ids.push_back(o.text_id);
            EXPECT_FALSE(text::trim(o.simplified_sentence).empty());
        }
        EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
        std::vector<std::string> want;
        for (const auto& t : ts) want.push_back(t.text_id);
        std::sort(want.begin(), want.end());
        EXPECT_EQ(ids, want);
    }
}

}  // namespace
}  // namespace cefrsimp
