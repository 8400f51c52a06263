#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Small string utilities shared by the rules, predictor and embedder.
namespace cefrsimp::text {

bool is_space(char c) noexcept;
bool is_ascii_alpha(char c) noexcept;
bool is_ascii_digit(char c) noexcept;

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s) noexcept;

/// Whitespace-delimited pieces.
std::vector<std::string_view> split_whitespace(std::string_view s);

/// Number of whitespace-delimited words.
std::size_t word_count(std::string_view s);

/// Lowercased word tokens: runs of letters, digits and non-ASCII bytes, with
/// internal apostrophes and hyphens kept ("don't", "well-known").
std::vector<std::string> word_tokens(std::string_view s);

/// Upper-cases the first ASCII letter if it is the first word character.
std::string capitalize_first(std::string s);

/// Collapses whitespace runs to one space and trims both ends.
std::string collapse_spaces(std::string_view s);

bool ends_with_terminal(std::string_view s) noexcept;

}  // namespace cefrsimp::text
