#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "cefrsimp/cefr.hpp"
#include "cefrsimp/config.hpp"
#include "cefrsimp/types.hpp"

namespace cefrsimp {

inline constexpr std::string_view kLevelSlot = "{CEFR-LEVEL}";
inline constexpr std::string_view kDescriptionSlot = "{CEFR-Description}";
inline constexpr std::string_view kSourceSlot = "{Source}";

/// Prompt template plus per-level descriptors.
///
/// {CEFR-Description} and {Source} must each appear exactly once;
/// {CEFR-LEVEL} must appear at least once (the stock template names the
/// level twice).
class PromptSpec {
public:
    /// Throws ConfigError if the template breaks the slot rules.
    PromptSpec(std::string templ, std::map<CefrLevel, std::string> level_descriptions);

    const std::string& templ() const noexcept { return template_; }
    const std::map<CefrLevel, std::string>& descriptions() const noexcept {
        return descriptions_;
    }

private:
    std::string template_;
    std::map<CefrLevel, std::string> descriptions_;
};

/// The baseline simplification prompt with one-sentence CEFR descriptors.
const PromptSpec& default_prompt_spec();

/// Fills the slots. Throws ConfigError if the target level has no descriptor.
std::string build_prompt(const PromptSpec& spec, const SimplificationTask& task);

/// Chat-completion style text generator. Must tolerate concurrent calls.
class LlmClient {
public:
    virtual ~LlmClient() = default;

    /// Returns the raw completion text. Throws LlmError.
    virtual std::string complete(std::string_view prompt) const = 0;
    virtual std::string name() const = 0;
};

/// Strips whitespace, surrounding quotes and a leading "Simplified Sentence:"
/// label. Throws LlmError(kEmpty) if nothing is left.
std::string clean_response(std::string_view raw);

/// complete() followed by clean_response().
std::string call_llm(const LlmClient& client, std::string_view prompt);

/// OpenAI-compatible /chat/completions client: one user message, temperature 0.
/// Retries once on a transport error; a timeout is not retried.
class ChatCompletionClient final : public LlmClient {
public:
    struct Options {
        std::string base_url = "https://api.openai.com/v1";
        std::string model = "gpt-4o-mini";
        std::string api_key;
        double timeout_s = 60.0;
        int max_inflight = 4;
    };

    explicit ChatCompletionClient(Options options);
    ~ChatCompletionClient() override;

    std::string complete(std::string_view prompt) const override;
    std::string name() const override { return "chat-completions:" + options_.model; }

    /// Request body sent for `prompt`. Exposed for tests.
    std::string request_body(std::string_view prompt) const;

private:
    struct Impl;
    Options options_;
    std::unique_ptr<Impl> impl_;
};

ChatCompletionClient::Options chat_options_from_config(const PipelineConfig& cfg);

/// First choice's message content. Throws LlmError(kBadResponse).
std::string decode_chat_response(std::string_view body);

/// Replays recorded completions keyed by exact prompt text.
/// File format: one JSON object per line, {"prompt", "completion"}.
/// A prompt with no recording throws LlmError(kTransport).
class FixtureLlm final : public LlmClient {
public:
    explicit FixtureLlm(std::unordered_map<std::string, std::string> recordings);

    static FixtureLlm from_file(const std::filesystem::path& path);

    std::string complete(std::string_view prompt) const override;
    std::string name() const override { return "fixture"; }
    std::size_t size() const noexcept { return recordings_.size(); }

private:
    std::unordered_map<std::string, std::string> recordings_;
};

/// Forwards to another client and appends every successful exchange to a
/// fixture file readable by FixtureLlm.
class RecordingLlm final : public LlmClient {
public:
    RecordingLlm(const LlmClient& inner, std::filesystem::path fixture_path);

    std::string complete(std::string_view prompt) const override;
    std::string name() const override { return "recording:" + inner_.name(); }

private:
    const LlmClient& inner_;
    std::filesystem::path path_;
    mutable std::mutex mutex_;
};

}  // namespace cefrsimp
