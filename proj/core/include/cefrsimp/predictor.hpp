#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cefrsimp/cefr.hpp"
#include "cefrsimp/config.hpp"

namespace cefrsimp {

/// One head's opinion: a level and a confidence in [0, 1].
struct HeadVote {
    CefrLevel level = CefrLevel::kA1;
    double confidence = 0.0;

    bool operator==(const HeadVote&) const = default;
};

struct EnsemblePrediction {
    std::array<HeadVote, 3> votes{};
    CefrLevel resolved = CefrLevel::kA1;
};

/// A single level classifier. Implementations must be safe to call from
/// several threads at once.
class LevelHead {
public:
    virtual ~LevelHead() = default;

    /// Throws ScorerError (carrying name()) on backend failure.
    virtual HeadVote predict(std::string_view text) const = 0;
    virtual std::string name() const = 0;
};

/// Vote cascade over any number of heads:
///   1. label with the most votes
///   2. among tied labels, the largest summed confidence
///   3. then the highest single-head confidence
///   4. then the lowest ordinal
/// Throws InputError on an empty vote list.
CefrLevel resolve_vote(std::span<const HeadVote> votes);

/// Raw text statistics the heuristic heads score.
struct TextFeatures {
    double mean_word_chars = 0.0;
    double mean_sentence_tokens = 0.0;
    double rare_ratio = 0.0;
    double subordinators_per_sentence = 0.0;
};

TextFeatures extract_features(std::string_view text);

/// True when `word` (lowercase) or a simple inflectional stem of it is in the
/// embedded 2000-word frequency list.
bool is_common_word(std::string_view word);

/// Weights and band thresholds of one heuristic head.
struct HeuristicProfile {
    std::string name;
    double w_word_chars = 1.0;
    double w_sentence_tokens = 0.15;
    double w_rare = 6.0;
    double w_subordinators = 0.8;
    // Ascending cut points between A1|A2, A2|B1, B1|B2, B2|C1, C1|C2.
    std::array<double, 5> thresholds{};
};

/// Deterministic offline level head: a weighted feature sum mapped onto
/// fixed level bands. Confidence is the distance to the nearest band edge,
/// normalized by half the band width and clamped to [0, 1].
class HeuristicHead final : public LevelHead {
public:
    explicit HeuristicHead(HeuristicProfile profile);

    HeadVote predict(std::string_view text) const override;
    std::string name() const override { return profile_.name; }

    double complexity(const TextFeatures& f) const noexcept;
    const HeuristicProfile& profile() const noexcept { return profile_; }

private:
    HeuristicProfile profile_;
};

/// The three built-in profiles, each with its own weights and bands.
std::array<HeuristicProfile, 3> builtin_profiles();

/// Looks up fixed votes by exact text. Unknown text -> ScorerError.
/// File format: one JSON object per line, {"text", "label", "confidence"}.
class FixtureHead final : public LevelHead {
public:
    FixtureHead(std::string name, std::unordered_map<std::string, HeadVote> table);

    static FixtureHead from_file(std::string name, const std::filesystem::path& path);

    HeadVote predict(std::string_view text) const override;
    std::string name() const override { return name_; }

private:
    std::string name_;
    std::unordered_map<std::string, HeadVote> table_;
};

/// POST {"text": ...} -> {"label": "A1".."C2", "confidence": number}.
/// Out-of-range confidences are clamped and logged.
class HttpHead final : public LevelHead {
public:
    HttpHead(std::string name, std::string url, double timeout_s, int max_inflight);
    ~HttpHead() override;

    HeadVote predict(std::string_view text) const override;
    std::string name() const override { return name_; }

private:
    struct Impl;
    std::string name_;
    std::unique_ptr<Impl> impl_;
};

/// Decodes one classifier response body. Exposed for tests.
HeadVote decode_head_response(const std::string& head_name, std::string_view body);

/// Three heads resolved by resolve_vote().
class Ensemble {
public:
    explicit Ensemble(std::array<std::shared_ptr<const LevelHead>, 3> heads);

    /// Errors from any head propagate as ScorerError naming that head.
    EnsemblePrediction predict(std::string_view text) const;
    CefrLevel predict_level(std::string_view text) const { return predict(text).resolved; }

    const std::array<std::shared_ptr<const LevelHead>, 3>& heads() const noexcept {
        return heads_;
    }

private:
    std::array<std::shared_ptr<const LevelHead>, 3> heads_;
};

Ensemble make_builtin_ensemble();
Ensemble make_http_ensemble(const EndpointConfig& endpoints);

}  // namespace cefrsimp
