#include "cefrsimp/predictor.hpp"

#include <algorithm>
#include <fstream>
#include <string>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cefrsimp/errors.hpp"
#include "cefrsimp/rules.hpp"
#include "cefrsimp/text.hpp"

namespace cefrsimp {

CefrLevel resolve_vote(std::span<const HeadVote> votes) {
    if (votes.empty()) throw InputError("resolve_vote needs at least one vote");

    std::array<int, kLevelCount> count{};
    std::array<double, kLevelCount> sum{};
    std::array<double, kLevelCount> peak{};
    for (const auto& v : votes) {
        const int i = ordinal(v.level);
        ++count[i];
        sum[i] += v.confidence;
        peak[i] = std::max(peak[i], v.confidence);
    }

    // Walking ordinals upward and replacing only on a strict improvement
    // leaves the lowest level in place on a full tie.
    int best = -1;
    for (int i = 0; i < kLevelCount; ++i) {
        if (count[i] == 0) continue;
        if (best < 0) {
            best = i;
            continue;
        }
        bool better = false;
        if (count[i] != count[best]) {
            better = count[i] > count[best];
        } else if (sum[i] != sum[best]) {
            better = sum[i] > sum[best];
        } else if (peak[i] != peak[best]) {
            better = peak[i] > peak[best];
        }
        if (better) best = i;
    }
    return static_cast<CefrLevel>(best);
}

namespace {

const std::unordered_set<std::string_view>& common_words() {
    static const std::unordered_set<std::string_view> words = {
#include "data/common_words.inc"
    };
    return words;
}

const std::unordered_set<std::string_view>& subordinators() {
    static const std::unordered_set<std::string_view> words = {
        "which", "that",   "who",     "whom",    "whose",   "where",   "when",
        "although", "though", "because", "since", "while",   "whereas", "unless",
        "however",  "if",     "whether", "despite", "whereby", "wherein"};
    return words;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool has_letter(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](char c) { return text::is_ascii_alpha(c); });
}

}  // namespace

bool is_common_word(std::string_view word) {
    const auto& words = common_words();
    if (words.contains(word)) return true;

    std::string w(word);
    if (ends_with(w, "'s")) w.resize(w.size() - 2);
    if (words.contains(w)) return true;

    auto try_stem = [&](std::string_view suffix, std::string_view replacement) {
        if (!ends_with(w, suffix)) return false;
        std::string stem = w.substr(0, w.size() - suffix.size());
        stem += replacement;
        return stem.size() >= 2 && words.contains(stem);
    };
    return try_stem("ies", "y") || try_stem("es", "") || try_stem("s", "") ||
           try_stem("ied", "y") || try_stem("ed", "") || try_stem("ed", "e") ||
           try_stem("ing", "") || try_stem("ing", "e") || try_stem("ly", "") ||
           try_stem("er", "") || try_stem("est", "");
}

TextFeatures extract_features(std::string_view input) {
    TextFeatures f;
    const auto tokens = text::word_tokens(input);
    if (tokens.empty()) return f;

    std::size_t chars = 0;
    std::size_t rare = 0;
    std::size_t subs = 0;
    for (const auto& t : tokens) {
        chars += t.size();
        if (has_letter(t) && !is_common_word(t)) ++rare;
        if (subordinators().contains(t)) ++subs;
    }
    const double n = static_cast<double>(tokens.size());
    const double sentences =
        static_cast<double>(std::max<std::size_t>(1, sentence_split(input).size()));

    f.mean_word_chars = static_cast<double>(chars) / n;
    f.mean_sentence_tokens = n / sentences;
    f.rare_ratio = static_cast<double>(rare) / n;
    f.subordinators_per_sentence = static_cast<double>(subs) / sentences;
    return f;
}

HeuristicHead::HeuristicHead(HeuristicProfile profile) : profile_(std::move(profile)) {
    const auto& t = profile_.thresholds;
    if (!std::is_sorted(t.begin(), t.end()) || std::adjacent_find(t.begin(), t.end()) != t.end()) {
        throw ConfigError("heuristic head '" + profile_.name +
                          "': thresholds must be strictly increasing");
    }
}

double HeuristicHead::complexity(const TextFeatures& f) const noexcept {
    return profile_.w_word_chars * f.mean_word_chars +
           profile_.w_sentence_tokens * f.mean_sentence_tokens + profile_.w_rare * f.rare_ratio +
           profile_.w_subordinators * f.subordinators_per_sentence;
}

HeadVote HeuristicHead::predict(std::string_view text) const {
    const double c = complexity(extract_features(text));
    const auto& t = profile_.thresholds;

    int band = 0;
    while (band < 5 && c >= t[band]) ++band;

    double margin = 0.0;
    double half = 0.0;
    if (band == 0) {
        margin = t[0] - c;
        half = (t[1] - t[0]) / 2.0;
    } else if (band == 5) {
        margin = c - t[4];
        half = (t[4] - t[3]) / 2.0;
    } else {
        margin = std::min(c - t[band - 1], t[band] - c);
        half = (t[band] - t[band - 1]) / 2.0;
    }
    const double confidence = std::clamp(margin / half, 0.0, 1.0);
    return {static_cast<CefrLevel>(band), confidence};
}

std::array<HeuristicProfile, 3> builtin_profiles() {
    return {{
        {"heuristic-lexical", 1.0, 0.15, 6.0, 0.8, {4.6, 7.0, 8.6, 11.8, 14.2}},
        {"heuristic-length", 0.9, 0.20, 5.0, 0.6, {4.6, 6.9, 8.4, 11.2, 13.5}},
        {"heuristic-syntax", 1.1, 0.12, 5.5, 1.1, {4.7, 7.1, 8.8, 12.0, 14.5}},
    }};
}

FixtureHead::FixtureHead(std::string name, std::unordered_map<std::string, HeadVote> table)
    : name_(std::move(name)), table_(std::move(table)) {}

FixtureHead FixtureHead::from_file(std::string name, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open predictor fixture " + path.string());
    std::unordered_map<std::string, HeadVote> table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            HeadVote vote{level_from_label(j.at("label").get<std::string>()),
                          j.value("confidence", 1.0)};
            table[j.at("text").get<std::string>()] = vote;
        } catch (const std::exception& e) {
            throw InputError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return FixtureHead(std::move(name), std::move(table));
}

HeadVote FixtureHead::predict(std::string_view text) const {
    auto it = table_.find(std::string(text));
    if (it == table_.end()) {
        throw ScorerError(name_, "no fixture vote for text '" + std::string(text.substr(0, 60)) + "'");
    }
    return it->second;
}

Ensemble::Ensemble(std::array<std::shared_ptr<const LevelHead>, 3> heads)
    : heads_(std::move(heads)) {
    for (const auto& h : heads_) {
        if (!h) throw ConfigError("ensemble needs three non-null heads");
    }
}

EnsemblePrediction Ensemble::predict(std::string_view text) const {
    EnsemblePrediction out;
    for (std::size_t i = 0; i < heads_.size(); ++i) {
        try {
            out.votes[i] = heads_[i]->predict(text);
        } catch (const ScorerError&) {
            throw;
        } catch (const std::exception& e) {
            throw ScorerError(heads_[i]->name(), e.what());
        }
    }
    out.resolved = resolve_vote(out.votes);
    return out;
}

Ensemble make_builtin_ensemble() {
    const auto profiles = builtin_profiles();
    return Ensemble({std::make_shared<HeuristicHead>(profiles[0]),
                     std::make_shared<HeuristicHead>(profiles[1]),
                     std::make_shared<HeuristicHead>(profiles[2])});
}

Ensemble make_http_ensemble(const EndpointConfig& ep) {
    std::array<std::shared_ptr<const LevelHead>, 3> heads;
    for (std::size_t i = 0; i < 3; ++i) {
        if (ep.predictor_urls[i].empty()) {
            throw ConfigError("predictor_urls[" + std::to_string(i) + "] is not set");
        }
        heads[i] = std::make_shared<HttpHead>("http-head-" + std::to_string(i + 1),
                                              ep.predictor_urls[i], ep.http_timeout_s,
                                              ep.http_max_inflight);
    }
    return Ensemble(std::move(heads));
}

}  // namespace cefrsimp
