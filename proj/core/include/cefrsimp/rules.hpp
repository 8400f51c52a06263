#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cefrsimp {

/// Complex word -> plain substitute. Keys and substitutes are single
/// lowercase tokens and no substitute is also a key, so replacement is
/// idempotent.
class Lexicon {
public:
    Lexicon() = default;

    /// Throws ConfigError when an invariant is violated.
    explicit Lexicon(std::map<std::string, std::string> entries);

    const std::string* find(std::string_view lowercase_word) const;
    std::size_t size() const noexcept { return entries_.size(); }
    const std::map<std::string, std::string, std::less<>>& entries() const noexcept {
        return entries_;
    }

private:
    std::map<std::string, std::string, std::less<>> entries_;
};

/// The embedded academic-to-plain lexicon.
const Lexicon& default_lexicon();

/// One "complex<TAB>simple" pair per line; blank lines and '#' comments are
/// skipped. Throws InputError with the line number on malformed lines.
Lexicon load_lexicon(const std::filesystem::path& path);

// The six transforms. All are total and deterministic.

/// Whole-token substitution keeping the case of the first letter.
std::string replace_words(std::string_view text, const Lexicon& lexicon = default_lexicon());

/// Drops digit-group separators and normalizes unit spellings.
std::string simplify_numbers_units(std::string_view text);

/// Deletes comma-delimited segments opened by a clause or discourse marker
/// (which/that/who/where/when/however/although). Never empties a nonempty text.
std::string strip_relative_clauses(std::string_view text);

/// Returns the shortest clause with at least three words and a verb-like
/// token, recapitalized and with terminal punctuation. Falls back to the input.
std::string keep_shortest_clause(std::string_view text);

/// Keeps at most `limit` words; after a cut, strips dangling function words
/// and commas. Always ends with terminal punctuation. Throws InputError if
/// limit < 1.
std::string trim_to_limit(std::string_view text, int limit);

/// Splits after . ! ? and ; (trimmed, nonempty parts).
std::vector<std::string> sentence_split(std::string_view text);

/// max(8, 28 - 2 * step_idx).
int word_budget(int step_idx);
/// max(10, word_budget(step_idx) - 4).
int split_budget(int step_idx);

struct RuleCandidate {
    std::string text;
    std::string chain;
    std::optional<int> word_budget;

    bool operator==(const RuleCandidate&) const = default;
};

/// The fixed eight variants followed by one trimmed variant per sentence of
/// strip_relative_clauses(text), before any filtering. Size is 8 + k.
std::vector<RuleCandidate> base_candidates_raw(std::string_view text, int step_idx,
                                               const Lexicon& lexicon = default_lexicon());

/// base_candidates_raw() with duplicates (first occurrence wins), empties and
/// copies of the input removed.
std::vector<RuleCandidate> base_candidates(std::string_view text, int step_idx,
                                           const Lexicon& lexicon = default_lexicon());

}  // namespace cefrsimp
