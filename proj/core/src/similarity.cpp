#include "cefrsimp/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cefrsimp/errors.hpp"
#include "cefrsimp/text.hpp"

namespace cefrsimp {

double EmbeddingVector::norm() const noexcept {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) {
        throw InputError("cosine_sim: dimension mismatch (" + std::to_string(a.dimension()) +
                         " vs " + std::to_string(b.dimension()) + ")");
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    const double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(c, -1.0, 1.0);
}

std::vector<EmbeddingVector> Embedder::embed_batch(std::span<const std::string> texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
}

namespace {

const std::unordered_set<std::string_view>& function_words() {
    static const std::unordered_set<std::string_view> m = {
        "a",     "an",    "the",   "and",   "or",    "but",   "so",    "of",    "to",
        "in",    "on",    "at",    "for",   "with",  "by",    "from",  "as",    "into",
        "is",    "are",   "was",   "were",  "be",    "been",  "being", "has",   "have",
        "had",   "do",    "does",  "did",   "it",    "its",   "this",  "that",  "these",
        "those", "which", "who",   "whom",  "whose", "there", "their", "they",  "he",
        "she",   "his",   "her",   "we",    "our",   "you",   "your",  "i",     "my",
        "not",   "no",    "will",  "would", "can",   "could", "may",   "might", "should"};
    return m;
}

// "12,000" -> "12000" so digit grouping does not change the tokens.
std::string drop_digit_separators(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == ',' && i > 0 && i + 1 < s.size() && text::is_ascii_digit(s[i - 1]) &&
            text::is_ascii_digit(s[i + 1])) {
            continue;
        }
        out += s[i];
    }
    return out;
}

}  // namespace

HashingEmbedder::HashingEmbedder(std::size_t dimension, std::shared_ptr<const Lexicon> synonyms)
    : dimension_(dimension), synonyms_(std::move(synonyms)) {
    if (dimension_ == 0) throw ConfigError("embedding dimension must be positive");
}

std::size_t HashingEmbedder::bucket(std::string_view token) const noexcept {
    // 64-bit FNV-1a; stable across platforms, unlike std::hash.
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : token) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h % dimension_);
}

EmbeddingVector HashingEmbedder::embed(std::string_view input) const {
    EmbeddingVector v{std::vector<double>(dimension_, 0.0)};
    for (const auto& token : text::word_tokens(drop_digit_separators(input))) {
        const std::string* canonical = synonyms_ ? synonyms_->find(token) : nullptr;
        const std::string_view t = canonical ? std::string_view(*canonical) : std::string_view(token);
        v.values[bucket(t)] += function_words().contains(t) ? kFunctionWordWeight : 1.0;
    }
    const double n = v.norm();
    if (n > 0.0) {
        for (double& x : v.values) x /= n;
    }
    return v;
}

std::vector<EmbeddingVector> decode_embedding_response(std::string_view body,
                                                       std::size_t expected_count) {
    const auto fail = [](const std::string& msg) {
        throw ScorerError("http-embedder", "malformed response: " + msg);
    };
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        fail(e.what());
    }
    if (!j.is_object() || !j.contains("vectors") || !j["vectors"].is_array()) {
        fail("missing 'vectors' array");
    }
    const auto& arr = j["vectors"];
    if (arr.size() != expected_count) {
        fail("expected " + std::to_string(expected_count) + " vectors, got " +
             std::to_string(arr.size()));
    }
    std::vector<EmbeddingVector> out;
    out.reserve(arr.size());
    for (const auto& row : arr) {
        if (!row.is_array()) fail("vector is not an array");
        EmbeddingVector v;
        v.values.reserve(row.size());
        for (const auto& x : row) {
            if (!x.is_number()) fail("non-numeric vector entry");
            const double d = x.get<double>();
            if (!std::isfinite(d)) fail("non-finite vector entry");
            v.values.push_back(d);
        }
        if (!out.empty() && v.dimension() != out.front().dimension()) {
            fail("inconsistent vector dimensions");
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace cefrsimp
