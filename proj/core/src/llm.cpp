#include "cefrsimp/llm.hpp"

#include <cstdlib>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "cefrsimp/errors.hpp"
#include "cefrsimp/text.hpp"

namespace cefrsimp {
namespace {

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

constexpr std::string_view kBaselineTemplate =
    "Please simplify the following Complex Sentence to make it easier to read and understand "
    "by {CEFR-LEVEL} CEFR level English learners. {CEFR-LEVEL} level English learner "
    "{CEFR-Description}. To simplify, you may replace difficult words with simpler ones, "
    "elaborate, or remove them when possible. You may also break down a lengthy sentence into "
    "shorter, clear sentences. Ensure the revised sentence is grammatically correct, fluent, "
    "and maintains the core message of the original without changing its meaning. Complex "
    "Sentence: {Source} Simplified Sentence:";

}  // namespace

PromptSpec::PromptSpec(std::string templ, std::map<CefrLevel, std::string> level_descriptions)
    : template_(std::move(templ)), descriptions_(std::move(level_descriptions)) {
    if (count_occurrences(template_, kLevelSlot) < 1) {
        throw ConfigError("prompt template must contain {CEFR-LEVEL}");
    }
    if (count_occurrences(template_, kDescriptionSlot) != 1) {
        throw ConfigError("prompt template must contain {CEFR-Description} exactly once");
    }
    if (count_occurrences(template_, kSourceSlot) != 1) {
        throw ConfigError("prompt template must contain {Source} exactly once");
    }
}

const PromptSpec& default_prompt_spec() {
    static const PromptSpec spec(
        std::string(kBaselineTemplate),
        {
            {CefrLevel::kA1,
             "can understand and use familiar everyday expressions and very basic phrases "
             "about themselves and their surroundings"},
            {CefrLevel::kA2,
             "can understand short sentences and common expressions about everyday needs "
             "such as family, shopping and work"},
            {CefrLevel::kB1,
             "can understand the main points of clear standard language about familiar "
             "topics met at work, school or in free time"},
            {CefrLevel::kB2,
             "can understand the main ideas of complex text on concrete and abstract topics "
             "and can talk with native speakers without strain"},
            {CefrLevel::kC1,
             "can understand a wide range of long and demanding texts and recognise "
             "implicit meaning"},
            {CefrLevel::kC2,
             "can understand with ease almost everything heard or read and can express "
             "fine shades of meaning precisely"},
        });
    return spec;
}

std::string build_prompt(const PromptSpec& spec, const SimplificationTask& task) {
    auto it = spec.descriptions().find(task.target);
    if (it == spec.descriptions().end()) {
        throw ConfigError("prompt spec has no descriptor for level " +
                          std::string(to_label(task.target)));
    }
    std::string prompt = spec.templ();
    // Source goes last so slot markers inside the source text stay literal.
    replace_all(prompt, kLevelSlot, to_label(task.target));
    replace_all(prompt, kDescriptionSlot, it->second);
    const auto pos = prompt.find(kSourceSlot);
    prompt.replace(pos, kSourceSlot.size(), task.original);
    return prompt;
}

std::string clean_response(std::string_view raw) {
    static constexpr std::string_view kLabel = "simplified sentence:";
    static constexpr std::string_view kOpenCurly = "\xE2\x80\x9C";
    static constexpr std::string_view kCloseCurly = "\xE2\x80\x9D";

    std::string s(text::trim(raw));
    for (bool changed = true; changed;) {
        changed = false;
        if (text::to_lower(s.substr(0, kLabel.size())) == kLabel) {
            s = std::string(text::trim(std::string_view(s).substr(kLabel.size())));
            changed = true;
        }
        if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                              (s.front() == '\'' && s.back() == '\''))) {
            s = std::string(text::trim(std::string_view(s).substr(1, s.size() - 2)));
            changed = true;
        } else if (s.size() >= 6 && s.starts_with(kOpenCurly) && s.ends_with(kCloseCurly)) {
            s = std::string(text::trim(std::string_view(s).substr(3, s.size() - 6)));
            changed = true;
        }
    }
    if (s.empty()) throw LlmError(LlmError::Kind::kEmpty, "LLM returned an empty completion");
    return s;
}

std::string call_llm(const LlmClient& client, std::string_view prompt) {
    return clean_response(client.complete(prompt));
}

ChatCompletionClient::Options chat_options_from_config(const PipelineConfig& cfg) {
    ChatCompletionClient::Options o;
    o.base_url = cfg.endpoints.llm_base_url;
    o.model = cfg.endpoints.llm_model;
    o.timeout_s = cfg.llm_timeout_s;
    o.max_inflight = cfg.endpoints.llm_max_inflight;
    if (const char* key = std::getenv(cfg.endpoints.llm_api_key_env.c_str())) o.api_key = key;
    return o;
}

std::string ChatCompletionClient::request_body(std::string_view prompt) const {
    nlohmann::json body = {
        {"model", options_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
        {"temperature", 0},
    };
    return body.dump();
}

std::string decode_chat_response(std::string_view body) {
    try {
        const auto j = nlohmann::json::parse(body);
        const auto& content = j.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) {
            throw LlmError(LlmError::Kind::kBadResponse, "completion content is not a string");
        }
        return content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw LlmError(LlmError::Kind::kBadResponse,
                       std::string("malformed chat completion response: ") + e.what());
    }
}

FixtureLlm::FixtureLlm(std::unordered_map<std::string, std::string> recordings)
    : recordings_(std::move(recordings)) {}

FixtureLlm FixtureLlm::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open LLM fixture " + path.string());
    std::unordered_map<std::string, std::string> recordings;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            recordings[j.at("prompt").get<std::string>()] = j.at("completion").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw InputError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return FixtureLlm(std::move(recordings));
}

std::string FixtureLlm::complete(std::string_view prompt) const {
    auto it = recordings_.find(std::string(prompt));
    if (it == recordings_.end()) {
        throw LlmError(LlmError::Kind::kTransport, "no recorded completion for prompt");
    }
    return it->second;
}

RecordingLlm::RecordingLlm(const LlmClient& inner, std::filesystem::path fixture_path)
    : inner_(inner), path_(std::move(fixture_path)) {}

std::string RecordingLlm::complete(std::string_view prompt) const {
    std::string completion = inner_.complete(prompt);
    const nlohmann::json line = {{"prompt", std::string(prompt)}, {"completion", completion}};
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::app);
    out << line.dump() << '\n';
    return completion;
}

}  // namespace cefrsimp
