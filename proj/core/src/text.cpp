#include "cefrsimp/text.hpp"

namespace cefrsimp::text {

bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_alpha(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool is_ascii_digit(char c) noexcept { return c >= '0' && c <= '9'; }

namespace {

bool is_word_byte(char c) noexcept {
    return is_ascii_alpha(c) || is_ascii_digit(c) || static_cast<unsigned char>(c) >= 0x80;
}

char lower(char c) noexcept { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = lower(c);
    return out;
}

std::string_view trim(std::string_view s) noexcept {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        const std::size_t start = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

std::size_t word_count(std::string_view s) {
    std::size_t n = 0;
    bool in_word = false;
    for (char c : s) {
        if (is_space(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++n;
        }
    }
    return n;
}

std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!is_word_byte(s[i])) {
            ++i;
            continue;
        }
        std::string token;
        while (i < s.size()) {
            if (is_word_byte(s[i])) {
                token.push_back(lower(s[i]));
                ++i;
            } else if ((s[i] == '\'' || s[i] == '-') && i + 1 < s.size() && is_word_byte(s[i + 1])) {
                token.push_back(s[i]);
                ++i;
            } else {
                break;
            }
        }
        out.push_back(std::move(token));
    }
    return out;
}

std::string capitalize_first(std::string s) {
    for (char& c : s) {
        if (is_ascii_alpha(c)) {
            if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
            break;
        }
        if (is_word_byte(c)) break;
    }
    return s;
}

std::string collapse_spaces(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : trim(s)) {
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

bool ends_with_terminal(std::string_view s) noexcept {
    s = trim(s);
    if (s.empty()) return false;
    char last = s.back();
    if ((last == '"' || last == '\'' || last == ')') && s.size() >= 2) last = s[s.size() - 2];
    return last == '.' || last == '!' || last == '?';
}

}  // namespace cefrsimp::text
