#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cefrsimp/rules.hpp"

namespace cefrsimp {

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dimension() const noexcept { return values.size(); }
    double norm() const noexcept;

    bool operator==(const EmbeddingVector&) const = default;
};

/// dot(a, b) / (|a| |b|), or 0 when either norm is 0.
/// Throws InputError on a dimension mismatch.
double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b);

/// Sentence embedder. Implementations must tolerate concurrent calls.
class Embedder {
public:
    virtual ~Embedder() = default;

    virtual EmbeddingVector embed(std::string_view text) const = 0;
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const;
    virtual std::string name() const = 0;
};

/// Feature-hashed bag of lowercased word tokens, L2-normalized. Before
/// hashing, digit group separators are dropped and each token found in
/// `synonyms` is replaced by its substitute, so a lexical substitution keeps
/// the vector. Function words weigh kFunctionWordWeight, other tokens 1.
/// Token-free text maps to the zero vector.
class HashingEmbedder final : public Embedder {
public:
    static constexpr std::size_t kDefaultDimension = 512;
    static constexpr double kFunctionWordWeight = 0.3;

    explicit HashingEmbedder(std::size_t dimension = kDefaultDimension,
                             std::shared_ptr<const Lexicon> synonyms = nullptr);

    EmbeddingVector embed(std::string_view text) const override;
    std::string name() const override { return "hashing-bow"; }

    std::size_t bucket(std::string_view token) const noexcept;

private:
    std::size_t dimension_;
    std::shared_ptr<const Lexicon> synonyms_;
};

/// POST {"texts": [...]} -> {"vectors": [[...], ...]}.
class HttpEmbedder final : public Embedder {
public:
    HttpEmbedder(std::string url, double timeout_s, int max_inflight);
    ~HttpEmbedder() override;

    EmbeddingVector embed(std::string_view text) const override;
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;
    std::string name() const override { return "http-embedder"; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Decodes an embedding response; checks count and consistent dimension.
std::vector<EmbeddingVector> decode_embedding_response(std::string_view body,
                                                       std::size_t expected_count);

}  // namespace cefrsimp
