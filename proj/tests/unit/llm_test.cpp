#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cefrsimp/errors.hpp"
#include "cefrsimp/llm.hpp"
#include "mock_server.hpp"
#include "mocks.hpp"

namespace cefrsimp {
namespace {

SimplificationTask task(std::string original, CefrLevel target) {
    return {"t", std::move(original), target, std::nullopt};
}

TEST(BuildPrompt, FillsSlots) {
    const auto p = build_prompt(default_prompt_spec(), task("X.", CefrLevel::kB1));
    EXPECT_NE(p.find("B1 CEFR level English learners"), std::string::npos);
    EXPECT_TRUE(p.ends_with("Complex Sentence: X. Simplified Sentence:")) << p;
    EXPECT_EQ(p.find("{"), std::string::npos);
    EXPECT_TRUE(p.starts_with("Please simplify the following Complex Sentence"));
}

TEST(BuildPrompt, SameLevelDiffersOnlyInSource) {
    const auto a = build_prompt(default_prompt_spec(), task("Alpha beta.", CefrLevel::kA2));
    const auto b = build_prompt(default_prompt_spec(), task("Gamma.", CefrLevel::kA2));
    const auto cut = a.find("Alpha beta.");
    ASSERT_NE(cut, std::string::npos);
    EXPECT_EQ(a.substr(0, cut), b.substr(0, cut));
    EXPECT_EQ(b.substr(cut), "Gamma. Simplified Sentence:");
}

TEST(BuildPrompt, SourceWithSlotMarkersStaysLiteral) {
    const auto p = build_prompt(default_prompt_spec(), task("Say {CEFR-LEVEL} now.", CefrLevel::kA1));
    EXPECT_TRUE(p.ends_with("Complex Sentence: Say {CEFR-LEVEL} now. Simplified Sentence:"));
}

TEST(PromptSpec, RejectsBadTemplates) {
    const std::map<CefrLevel, std::string> d{{CefrLevel::kA1, "x"}};
    EXPECT_THROW(PromptSpec("{CEFR-LEVEL} {CEFR-Description}", d), ConfigError);
    EXPECT_THROW(PromptSpec("{CEFR-Description} {Source}", d), ConfigError);
    EXPECT_THROW(PromptSpec("{CEFR-LEVEL} {Source} {Source} {CEFR-Description}", d), ConfigError);
    const PromptSpec only_a1("{CEFR-LEVEL}: {CEFR-Description}; {Source}", d);
    EXPECT_EQ(build_prompt(only_a1, task("s", CefrLevel::kA1)), "A1: x; s");
    EXPECT_THROW(build_prompt(only_a1, task("s", CefrLevel::kB2)), ConfigError);
}

TEST(CleanResponse, StripRules) {
    EXPECT_EQ(clean_response("  \"It is easy.\"  "), "It is easy.");
    EXPECT_EQ(clean_response("Simplified Sentence: Go home."), "Go home.");
    EXPECT_EQ(clean_response("simplified sentence: \"Go.\""), "Go.");
    EXPECT_EQ(clean_response("\xE2\x80\x9CHi there.\xE2\x80\x9D"), "Hi there.");
    EXPECT_EQ(clean_response("Keep \"inner\" quotes."), "Keep \"inner\" quotes.");
    try {
        clean_response("");
        FAIL();
    } catch (const LlmError& e) {
        EXPECT_EQ(e.kind(), LlmError::Kind::kEmpty);
    }
    EXPECT_THROW(clean_response("  \"\" "), LlmError);
}

TEST(CallLlm, CleansCompletion) {
    testing::CannedLlm llm("Simplified Sentence: SIMPLE.");
    EXPECT_EQ(call_llm(llm, "p"), "SIMPLE.");
    EXPECT_EQ(llm.calls(), 1);
}

TEST(FixtureLlm, ReplaysRecordings) {
    const auto path = std::filesystem::temp_directory_path() / "cefrsimp_llm_fixture.jsonl";
    std::filesystem::remove(path);
    {
        testing::CannedLlm inner("Short.");
        const RecordingLlm rec(inner, path);
        EXPECT_EQ(rec.complete("prompt one"), "Short.");
        EXPECT_EQ(rec.complete("prompt two"), "Short.");
    }
    const auto a = FixtureLlm::from_file(path);
    const auto b = FixtureLlm::from_file(path);
    EXPECT_EQ(a.size(), 2u);
    EXPECT_EQ(a.complete("prompt one"), b.complete("prompt one"));
    EXPECT_EQ(a.complete("prompt two"), "Short.");
    EXPECT_THROW(a.complete("unrecorded"), LlmError);
    std::filesystem::remove(path);
}

TEST(DecodeChatResponse, FirstChoice) {
    EXPECT_EQ(decode_chat_response(
                  R"({"choices":[{"message":{"role":"assistant","content":"A."}},{"message":{"content":"B."}}]})"),
              "A.");
    EXPECT_THROW(decode_chat_response(R"({"choices":[]})"), LlmError);
    EXPECT_THROW(decode_chat_response("{"), LlmError);
    EXPECT_THROW(decode_chat_response(R"({"choices":[{"message":{"content":null}}]})"), LlmError);
}

ChatCompletionClient::Options options_for(const testing::MockServer& s, double timeout_s) {
    ChatCompletionClient::Options o;
    o.base_url = s.url("/v1");
    o.model = "test-model";
    o.api_key = "k";
    o.timeout_s = timeout_s;
    return o;
}

std::string chat_reply(const std::string& content) {
    return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}
        .dump();
}

TEST(ChatCompletionClient, EchoesThroughMockEndpoint) {
    testing::MockServer s;
    std::string seen_body, seen_auth;
    s.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_body = req.body;
        seen_auth = req.get_header_value("Authorization");
        res.set_content(chat_reply("SIMPLE."), "application/json");
    });
    s.start();
    const ChatCompletionClient client(options_for(s, 5.0));
    EXPECT_EQ(call_llm(client, "Simplify this."), "SIMPLE.");
    const auto body = nlohmann::json::parse(seen_body);
    EXPECT_EQ(body["model"], "test-model");
    EXPECT_EQ(body["temperature"], 0);
    EXPECT_EQ(body["messages"].size(), 1u);
    EXPECT_EQ(body["messages"][0]["content"], "Simplify this.");
    EXPECT_EQ(seen_auth, "Bearer k");
}

TEST(ChatCompletionClient, TimeoutIsNotRetried) {
    testing::MockServer s;
    std::atomic<int> hits{0};
    s.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        std::this_thread::sleep_for(std::chrono::milliseconds(700));
        res.set_content(chat_reply("late"), "application/json");
    });
    s.start();
    const ChatCompletionClient client(options_for(s, 0.2));
    try {
        client.complete("p");
        FAIL() << "expected a timeout";
    } catch (const LlmError& e) {
        EXPECT_EQ(e.kind(), LlmError::Kind::kTimeout);
    }
    EXPECT_EQ(hits.load(), 1);
}

TEST(ChatCompletionClient, RetriesOnceOnServerError) {
    testing::MockServer s;
    std::atomic<int> hits{0};
    s.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        if (hits++ == 0) {
            res.status = 503;
            return;
        }
        res.set_content(chat_reply("Second try."), "application/json");
    });
    s.start();
    const ChatCompletionClient client(options_for(s, 5.0));
    EXPECT_EQ(client.complete("p"), "Second try.");
    EXPECT_EQ(hits.load(), 2);
}

TEST(ChatCompletionClient, GivesUpAfterSecondFailure) {
    testing::MockServer s;
    std::atomic<int> hits{0};
    s.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 500;
    });
    s.start();
    const ChatCompletionClient client(options_for(s, 5.0));
    EXPECT_THROW(client.complete("p"), LlmError);
    EXPECT_EQ(hits.load(), 2);
}

TEST(ChatCompletionClient, ClientErrorIsNotRetried) {
    testing::MockServer s;
    std::atomic<int> hits{0};
    s.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 401;
    });
    s.start();
    const ChatCompletionClient client(options_for(s, 5.0));
    EXPECT_THROW(client.complete("p"), LlmError);
    EXPECT_EQ(hits.load(), 1);
}

TEST(ChatCompletionClient, RejectsBadOptions) {
    ChatCompletionClient::Options o;
    o.timeout_s = 0;
    EXPECT_THROW(ChatCompletionClient{o}, ConfigError);
}

}  // namespace
}  // namespace cefrsimp
