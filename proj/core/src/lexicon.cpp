#include <algorithm>
#include <fstream>
#include <string>

#include "cefrsimp/errors.hpp"
#include "cefrsimp/rules.hpp"
#include "cefrsimp/text.hpp"

namespace cefrsimp {
namespace {

bool is_lower_word(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace

Lexicon::Lexicon(std::map<std::string, std::string> entries) {
    for (auto& [key, sub] : entries) {
        if (!is_lower_word(key)) {
            throw ConfigError("lexicon key '" + key + "' must be a single lowercase word");
        }
        if (!is_lower_word(sub)) {
            throw ConfigError("lexicon substitute '" + sub + "' for '" + key +
                              "' must be a single lowercase word");
        }
    }
    for (const auto& [key, sub] : entries) {
        if (entries.contains(sub)) {
            throw ConfigError("lexicon substitute '" + sub + "' (for '" + key +
                              "') is also a key; replacement would not be idempotent");
        }
    }
    entries_.insert(entries.begin(), entries.end());
}

const std::string* Lexicon::find(std::string_view lowercase_word) const {
    auto it = entries_.find(lowercase_word);
    return it == entries_.end() ? nullptr : &it->second;
}

const Lexicon& default_lexicon() {
    static const Lexicon lexicon = [] {
        std::map<std::string, std::string> m = {
#include "data/default_lexicon.inc"
        };
        return Lexicon(std::move(m));
    }();
    return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open lexicon file " + path.string());
    std::map<std::string, std::string> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw InputError(path.string() + " line " + std::to_string(line_no) +
                             ": expected complex<TAB>simple");
        }
        const std::string key = text::to_lower(text::trim(std::string_view(line).substr(0, tab)));
        const std::string sub = text::to_lower(text::trim(std::string_view(line).substr(tab + 1)));
        if (key.empty() || sub.empty()) {
            throw InputError(path.string() + " line " + std::to_string(line_no) + ": empty field");
        }
        entries[key] = sub;
    }
    return Lexicon(std::move(entries));
}

}  // namespace cefrsimp
