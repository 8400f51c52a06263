// HTTP adapters for the classifier heads, the embedder and the chat LLM.
// This is the only translation unit that includes httplib.

#include <chrono>
#include <algorithm>
#include <cmath>
#include <semaphore>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "cefrsimp/errors.hpp"
#include "cefrsimp/llm.hpp"
#include "cefrsimp/predictor.hpp"
#include "cefrsimp/similarity.hpp"

namespace cefrsimp {
namespace {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Url split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("URL lacks a scheme: '" + url + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

class InflightGuard {
public:
    explicit InflightGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
    ~InflightGuard() { sem_.release(); }
    InflightGuard(const InflightGuard&) = delete;
    InflightGuard& operator=(const InflightGuard&) = delete;

private:
    std::counting_semaphore<>& sem_;
};

httplib::Result post_json(const Url& url, const std::string& body, double timeout_s,
                          const httplib::Headers& headers = {}) {
    httplib::Client cli(url.origin);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(timeout_s));
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    return cli.Post(url.path, headers, body, "application/json");
}

}  // namespace

HeadVote decode_head_response(const std::string& head_name, std::string_view body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScorerError(head_name, std::string("malformed response: ") + e.what());
    }
    if (!j.is_object() || !j.contains("label") || !j["label"].is_string()) {
        throw ScorerError(head_name, "malformed response: missing string 'label'");
    }
    if (!j.contains("confidence") || !j["confidence"].is_number()) {
        throw ScorerError(head_name, "malformed response: missing numeric 'confidence'");
    }
    HeadVote vote;
    try {
        vote.level = level_from_label(j["label"].get<std::string>());
    } catch (const InputError& e) {
        throw ScorerError(head_name, e.what());
    }
    double confidence = j["confidence"].get<double>();
    if (!std::isfinite(confidence)) throw ScorerError(head_name, "non-finite confidence");
    if (confidence < 0.0 || confidence > 1.0) {
        spdlog::warn("{}: confidence {} outside [0, 1], clamped", head_name, confidence);
        confidence = std::clamp(confidence, 0.0, 1.0);
    }
    vote.confidence = confidence;
    return vote;
}

struct HttpHead::Impl {
    Url url;
    double timeout_s;
    mutable std::counting_semaphore<> inflight;

    Impl(const std::string& u, double t, int cap) : url(split_url(u)), timeout_s(t), inflight(cap) {}
};

HttpHead::HttpHead(std::string name, std::string url, double timeout_s, int max_inflight)
    : name_(std::move(name)), impl_(std::make_unique<Impl>(url, timeout_s, max_inflight)) {}

HttpHead::~HttpHead() = default;

HeadVote HttpHead::predict(std::string_view text) const {
    const std::string body = nlohmann::json{{"text", std::string(text)}}.dump();
    httplib::Result res;
    {
        InflightGuard guard(impl_->inflight);
        res = post_json(impl_->url, body, impl_->timeout_s);
    }
    if (!res) throw ScorerError(name_, "transport error: " + httplib::to_string(res.error()));
    if (res->status != 200) throw ScorerError(name_, "HTTP status " + std::to_string(res->status));
    return decode_head_response(name_, res->body);
}

struct HttpEmbedder::Impl {
    Url url;
    double timeout_s;
    mutable std::counting_semaphore<> inflight;

    Impl(const std::string& u, double t, int cap) : url(split_url(u)), timeout_s(t), inflight(cap) {}
};

HttpEmbedder::HttpEmbedder(std::string url, double timeout_s, int max_inflight)
    : impl_(std::make_unique<Impl>(url, timeout_s, max_inflight)) {}

HttpEmbedder::~HttpEmbedder() = default;

EmbeddingVector HttpEmbedder::embed(std::string_view text) const {
    const std::string one(text);
    return embed_batch(std::span<const std::string>(&one, 1)).front();
}

std::vector<EmbeddingVector> HttpEmbedder::embed_batch(std::span<const std::string> texts) const {
    const std::string body =
        nlohmann::json{{"texts", std::vector<std::string>(texts.begin(), texts.end())}}.dump();
    httplib::Result res;
    {
        InflightGuard guard(impl_->inflight);
        res = post_json(impl_->url, body, impl_->timeout_s);
    }
    if (!res) throw ScorerError(name(), "transport error: " + httplib::to_string(res.error()));
    if (res->status != 200) throw ScorerError(name(), "HTTP status " + std::to_string(res->status));
    return decode_embedding_response(res->body, texts.size());
}

struct ChatCompletionClient::Impl {
    Url url;
    mutable std::counting_semaphore<> inflight;

    Impl(const std::string& base, int cap) : url(split_url(base + "/chat/completions")), inflight(cap) {}
};

ChatCompletionClient::ChatCompletionClient(Options options)
    : options_(std::move(options)) {
    if (options_.timeout_s <= 0.0) throw ConfigError("LLM timeout must be positive");
    if (options_.max_inflight < 1) throw ConfigError("LLM in-flight cap must be >= 1");
    std::string base = options_.base_url;
    while (!base.empty() && base.back() == '/') base.pop_back();
    impl_ = std::make_unique<Impl>(base, options_.max_inflight);
}

ChatCompletionClient::~ChatCompletionClient() = default;

std::string ChatCompletionClient::complete(std::string_view prompt) const {
    const std::string body = request_body(prompt);
    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

    InflightGuard guard(impl_->inflight);
    for (int attempt = 0; attempt < 2; ++attempt) {
        const auto started = std::chrono::steady_clock::now();
        auto res = post_json(impl_->url, body, options_.timeout_s, headers);
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        if (!res) {
            const bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                                   elapsed >= 0.9 * options_.timeout_s;
            if (timed_out) {
                throw LlmError(LlmError::Kind::kTimeout,
                               "LLM request timed out after " + std::to_string(elapsed) + " s");
            }
            if (attempt == 0) {
                spdlog::warn("LLM transport error ({}), retrying once",
                             httplib::to_string(res.error()));
                continue;
            }
            throw LlmError(LlmError::Kind::kTransport,
                           "LLM transport error: " + httplib::to_string(res.error()));
        }
        if (res->status == 429 || res->status >= 500) {
            if (attempt == 0) {
                spdlog::warn("LLM endpoint returned HTTP {}, retrying once", res->status);
                continue;
            }
        }
        if (res->status != 200) {
            throw LlmError(LlmError::Kind::kTransport,
                           "LLM endpoint returned HTTP " + std::to_string(res->status));
        }
        return decode_chat_response(res->body);
    }
    throw LlmError(LlmError::Kind::kTransport, "LLM request failed");
}

}  // namespace cefrsimp
