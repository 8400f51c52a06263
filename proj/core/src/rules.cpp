#include "cefrsimp/rules.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <unordered_set>

#include "cefrsimp/errors.hpp"
#include "cefrsimp/text.hpp"

namespace cefrsimp {
namespace {

using text::is_ascii_alpha;
using text::is_ascii_digit;

bool is_word_byte(char c) {
    return is_ascii_alpha(c) || is_ascii_digit(c) || static_cast<unsigned char>(c) >= 0x80;
}

std::string match_case(std::string_view original, std::string replacement) {
    if (!original.empty() && original.front() >= 'A' && original.front() <= 'Z' &&
        !replacement.empty() && replacement.front() >= 'a' && replacement.front() <= 'z') {
        replacement.front() = static_cast<char>(replacement.front() - 32);
    }
    return replacement;
}

// Applies `lookup` to every maximal ASCII-letter run that is not glued to a
// digit or non-ASCII byte. `lookup` returns nullptr to keep the run.
template <typename Lookup>
std::string map_letter_runs(std::string_view s, Lookup&& lookup) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (!is_ascii_alpha(s[i])) {
            out.push_back(s[i++]);
            continue;
        }
        const std::size_t start = i;
        while (i < s.size() && is_ascii_alpha(s[i])) ++i;
        const std::string_view run = s.substr(start, i - start);
        const bool glued = (start > 0 && is_word_byte(s[start - 1])) ||
                           (i < s.size() && is_word_byte(s[i]));
        const std::string* sub = glued ? nullptr : lookup(text::to_lower(run));
        if (sub) {
            out += match_case(run, *sub);
        } else {
            out.append(run);
        }
    }
    return out;
}

const std::unordered_set<std::string_view>& clause_markers() {
    static const std::unordered_set<std::string_view> m = {
        "which", "that", "who", "where", "when", "however", "although"};
    return m;
}

const std::unordered_set<std::string_view>& subordinate_openers() {
    static const std::unordered_set<std::string_view> m = {
        "which",  "that",    "who",     "whom",  "whose", "where",  "when",
        "however", "although", "though", "because", "since", "while", "whereas",
        "unless", "if",      "whether", "after", "before", "until",  "despite"};
    return m;
}

const std::unordered_set<std::string_view>& coordinators() {
    static const std::unordered_set<std::string_view> m = {"and", "but", "or", "so", "yet"};
    return m;
}

const std::unordered_set<std::string_view>& finite_verbs() {
    static const std::unordered_set<std::string_view> m = {
        "am",     "is",     "are",    "was",    "were",   "be",     "been",   "has",
        "have",   "had",    "do",     "does",   "did",    "can",    "could",  "will",
        "would",  "shall",  "should", "may",    "might",  "must",   "go",     "goes",
        "went",   "get",    "gets",   "got",    "make",   "makes",  "made",   "take",
        "takes",  "took",   "come",   "comes",  "came",   "see",    "sees",   "saw",
        "know",   "knows",  "knew",   "think",  "thinks", "thought", "say",   "says",
        "said",   "give",   "gives",  "gave",   "find",   "finds",  "found",  "tell",
        "tells",  "told",   "feel",   "feels",  "felt",   "keep",   "keeps",  "kept",
        "leave",  "leaves", "left",   "run",    "runs",   "ran",    "eat",    "eats",
        "ate",    "like",   "likes",  "want",   "wants",  "need",   "needs",  "use",
        "uses",   "work",   "works",  "live",   "lives",  "help",   "helps",  "show",
        "shows",  "build",  "builds", "built",  "buy",    "buys",   "bought", "begin",
        "begins", "began",  "start",  "starts", "stop",   "stops",  "grow",   "grows",
        "grew",   "bring",  "brings", "brought", "hold",  "holds",  "held",   "stand",
        "stands", "stood",  "sit",    "sits",   "sat",    "bark",   "barks",  "play",
        "plays",  "read",   "reads",  "write",  "writes", "wrote",  "speak",  "speaks",
        "spoke",  "meet",   "meets",  "met",    "pay",    "pays",   "paid",   "lose",
        "loses",  "lost",   "win",    "wins",   "won",    "fall",   "falls",  "fell",
        "become", "becomes", "became", "seem",  "seems",  "mean",   "means",  "put",
        "puts",   "set",    "sets",   "let",    "lets",   "cost",   "costs",  "cut",
        "cuts",   "hit",    "hits",   "sleep",  "sleeps", "slept",  "drive",  "drives",
        "drove",  "fly",    "flies",  "flew",   "rise",   "rises",  "rose",   "sell",
        "sells",  "sold",   "send",   "sends",  "sent",   "spend",  "spends", "spent",
        "teach",  "teaches", "taught", "understand", "understands", "understood",
        "happen", "happens", "move",  "moves",  "try",    "tries",  "call",   "calls",
        "ask",    "asks",   "look",   "looks",  "walk",   "walks",  "fail",   "fails",
        "love",   "loves",  "hate",   "hates",  "agree",  "agrees", "change", "changes",
        "rain",   "rains",  "die",    "dies",   "hope",   "hopes",  "wait",   "waits"};
    return m;
}

const std::unordered_set<std::string_view>& dangling_words() {
    static const std::unordered_set<std::string_view> m = {
        "and", "or",   "but",  "of",   "to",   "the",  "a",     "an",    "in",  "on",
        "at",  "for",  "with", "by",   "from", "into", "about", "as",    "than", "that",
        "which", "who", "whose", "whom", "where", "when", "while", "because", "if",
        "is",  "are",  "was",  "were", "be",   "been", "has",   "have",  "had", "its",
        "their", "his", "her", "our",  "your", "my",   "this",  "these", "those", "very",
        "many", "some", "several", "few", "each", "every", "such", "more", "most", "numerous"};
    return m;
}

const std::unordered_set<std::string_view>& abbreviations() {
    static const std::unordered_set<std::string_view> m = {
        "mr", "mrs", "ms", "dr", "st", "prof", "vs", "etc", "e.g", "i.e", "inc", "jr", "sr", "no"};
    return m;
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

// A comma inside a number such as 12,000 does not separate clauses.
bool is_clause_comma(std::string_view s, std::size_t i) {
    return s[i] == ',' && !(i > 0 && i + 1 < s.size() && text::is_ascii_digit(s[i - 1]) &&
                            text::is_ascii_digit(s[i + 1]));
}

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

// Lowercased word with leading/trailing punctuation removed.
std::string bare_word(std::string_view w) {
    std::size_t b = 0;
    std::size_t e = w.size();
    while (b < e && !is_word_byte(w[b])) ++b;
    while (e > b && !is_word_byte(w[e - 1])) --e;
    return text::to_lower(w.substr(b, e - b));
}

std::string first_word(std::string_view s) {
    const auto words = text::split_whitespace(s);
    return words.empty() ? std::string{} : bare_word(words.front());
}

bool verb_like(std::string_view word) {
    if (finite_verbs().contains(word)) return true;
    return word.size() > 3 && word.substr(word.size() - 2) == "ed";
}

// Repairs spacing and punctuation left behind by deletions.
std::string repair_punctuation(std::string_view s) {
    std::string t = text::collapse_spaces(s);
    std::string out;
    out.reserve(t.size());
    for (char c : t) {
        const bool punct = c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '?';
        if (punct && !out.empty() && out.back() == ' ') out.pop_back();
        if (c == ',' && !out.empty() && (out.back() == ',' || is_terminal(out.back()))) continue;
        if (is_terminal(c) && !out.empty() && out.back() == ',') out.pop_back();
        out.push_back(c);
    }
    std::size_t b = 0;
    while (b < out.size() && (out[b] == ',' || out[b] == ';' || out[b] == ' ')) ++b;
    return out.substr(b);
}

// Strips clause-marker segments from one sentence. Returns the sentence
// unchanged when nothing qualifies or when everything would be removed.
std::string strip_sentence(const std::string& sentence) {
    std::vector<std::string> segs;
    {
        std::size_t start = 0;
        for (std::size_t i = 0; i <= sentence.size(); ++i) {
            if (i == sentence.size() || is_clause_comma(sentence, i)) {
                segs.push_back(sentence.substr(start, i - start));
                start = i + 1;
            }
        }
    }
    if (segs.size() < 2) {
        return sentence;
    }

    std::vector<bool> keep(segs.size(), true);
    if (clause_markers().contains(first_word(segs[0]))) keep[0] = false;
    for (std::size_t i = 1; i < segs.size(); ++i) {
        if (clause_markers().contains(first_word(segs[i]))) keep[i] = false;
    }
    if (std::all_of(keep.begin(), keep.end(), [](bool k) { return k; })) return sentence;

    // Terminal punctuation of the last segment survives its deletion.
    std::string tail;
    if (!keep.back()) {
        const std::string& last = segs.back();
        std::size_t e = last.size();
        while (e > 0 && (is_terminal(last[e - 1]) || is_closer(last[e - 1]) || last[e - 1] == ';')) {
            --e;
        }
        tail = last.substr(e);
    }

    std::string out;
    std::ptrdiff_t prev_kept = -2;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (!keep[i]) continue;
        if (prev_kept >= 0 && static_cast<std::size_t>(prev_kept) + 1 == i) out.push_back(',');
        out += segs[i];
        prev_kept = static_cast<std::ptrdiff_t>(i);
    }
    out += tail;
    out = repair_punctuation(out);
    if (text::word_count(out) == 0) return sentence;
    if (!keep[0]) out = text::capitalize_first(std::move(out));
    return out;
}

struct Segment {
    std::string text;
    char terminal = '.';
};

// Splits on clause punctuation, sentence ends and coordinators.
std::vector<Segment> clause_segments(std::string_view s) {
    static constexpr std::string_view kEmDash = "\xE2\x80\x94";
    static constexpr std::string_view kEnDash = "\xE2\x80\x93";

    std::vector<Segment> pieces;
    std::vector<std::size_t> sentence_of_piece;
    std::vector<char> sentence_terminal;
    std::string current;
    std::size_t sentence_idx = 0;
    auto flush = [&] {
        pieces.push_back({current, '.'});
        sentence_of_piece.push_back(sentence_idx);
        current.clear();
    };
    for (std::size_t i = 0; i < s.size();) {
        const char c = s[i];
        if (is_clause_comma(s, i) || c == ';' || c == ':') {
            flush();
            ++i;
        } else if (s.substr(i, 3) == kEmDash || s.substr(i, 3) == kEnDash) {
            flush();
            i += 3;
        } else if (is_terminal(c) && (i + 1 == s.size() || text::is_space(s[i + 1]) ||
                                      is_closer(s[i + 1]) || is_terminal(s[i + 1]))) {
            flush();
            sentence_terminal.resize(sentence_idx + 1, '.');
            sentence_terminal[sentence_idx] = c;
            ++sentence_idx;
            while (i < s.size() && (is_terminal(s[i]) || is_closer(s[i]))) ++i;
        } else {
            current.push_back(c);
            ++i;
        }
    }
    flush();
    sentence_terminal.resize(sentence_idx + 1, '.');

    std::vector<Segment> out;
    for (std::size_t p = 0; p < pieces.size(); ++p) {
        const char term = sentence_terminal[sentence_of_piece[p]];
        std::string part;
        for (auto w : text::split_whitespace(pieces[p].text)) {
            if (coordinators().contains(bare_word(w))) {
                out.push_back({part, term});
                part.clear();
                continue;
            }
            if (!part.empty()) part.push_back(' ');
            part.append(w);
        }
        out.push_back({part, term});
    }
    return out;
}

bool well_formed_clause(std::string_view segment) {
    const auto words = text::split_whitespace(segment);
    if (words.size() < 3) return false;
    if (subordinate_openers().contains(bare_word(words.front()))) return false;
    return std::any_of(words.begin(), words.end(),
                       [](std::string_view w) { return verb_like(bare_word(w)); });
}

std::string ensure_terminal(std::string s, char terminal = '.') {
    while (!s.empty() && (s.back() == ',' || s.back() == ';' || s.back() == ':' ||
                          s.back() == '-' || text::is_space(s.back()))) {
        s.pop_back();
    }
    if (s.empty()) return s;
    if (!text::ends_with_terminal(s)) s.push_back(terminal);
    return s;
}

struct UnitSpelling {
    std::string_view from;
    std::string to;
};

const std::vector<UnitSpelling>& unit_table() {
    static const std::vector<UnitSpelling> t = {
        {"metre", "meter"},           {"metres", "meters"},
        {"kilometre", "kilometer"},   {"kilometres", "kilometers"},
        {"centimetre", "centimeter"}, {"centimetres", "centimeters"},
        {"millimetre", "millimeter"}, {"millimetres", "millimeters"},
        {"litre", "liter"},           {"litres", "liters"},
        {"millilitre", "milliliter"}, {"millilitres", "milliliters"},
        {"gramme", "gram"},           {"grammes", "grams"},
        {"kilogramme", "kilogram"},   {"kilogrammes", "kilograms"},
        {"kms", "km"},                {"kgs", "kg"},
        {"hrs", "hours"},             {"mins", "minutes"},
    };
    return t;
}

std::string remove_digit_separators(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const bool separator = s[i] == ',' && !out.empty() && is_ascii_digit(out.back()) &&
                               i + 3 < s.size() && is_ascii_digit(s[i + 1]) &&
                               is_ascii_digit(s[i + 2]) &&
                               is_ascii_digit(s[i + 3]) &&
                               (i + 4 >= s.size() || !is_ascii_digit(s[i + 4]));
        if (separator) continue;
        out.push_back(s[i]);
    }
    return out;
}

// "per cent" -> "percent", case-insensitive, whole words.
std::string join_per_cent(std::string s) {
    std::size_t pos = 0;
    while (true) {
        const std::string lower = text::to_lower(s);
        pos = lower.find("per cent", pos);
        if (pos == std::string::npos) break;
        const bool left_ok = pos == 0 || !is_word_byte(s[pos - 1]);
        const bool right_ok = pos + 8 >= s.size() || !is_word_byte(s[pos + 8]);
        if (left_ok && right_ok) {
            s.erase(pos + 3, 1);
        } else {
            ++pos;
        }
    }
    return s;
}

}  // namespace

std::string replace_words(std::string_view input, const Lexicon& lexicon) {
    return map_letter_runs(input, [&](const std::string& lw) { return lexicon.find(lw); });
}

std::string simplify_numbers_units(std::string_view input) {
    std::string s = remove_digit_separators(input);
    s = map_letter_runs(s, [](const std::string& lw) -> const std::string* {
        for (const auto& u : unit_table()) {
            if (u.from == lw) return &u.to;
        }
        return nullptr;
    });
    return join_per_cent(std::move(s));
}

std::string strip_relative_clauses(std::string_view input) {
    const auto sentences = sentence_split(input);
    std::string out;
    bool changed = false;
    for (const auto& sentence : sentences) {
        std::string stripped = strip_sentence(sentence);
        changed = changed || stripped != sentence;
        if (!out.empty()) out.push_back(' ');
        out += stripped;
    }
    if (!changed || text::word_count(out) == 0) return std::string(input);
    return out;
}

std::string keep_shortest_clause(std::string_view input) {
    const auto segments = clause_segments(input);
    const Segment* best = nullptr;
    std::size_t best_words = 0;
    std::size_t best_chars = 0;
    for (const auto& seg : segments) {
        if (!well_formed_clause(seg.text)) continue;
        const std::size_t words = text::word_count(seg.text);
        const std::size_t chars = text::trim(seg.text).size();
        if (!best || words < best_words || (words == best_words && chars < best_chars)) {
            best = &seg;
            best_words = words;
            best_chars = chars;
        }
    }
    if (!best) return std::string(input);
    return ensure_terminal(text::capitalize_first(text::collapse_spaces(best->text)),
                           best->terminal);
}

std::string trim_to_limit(std::string_view input, int limit) {
    if (limit < 1) throw InputError("trim_to_limit: limit must be >= 1");
    const auto words = text::split_whitespace(input);
    if (words.empty()) return {};
    if (words.size() <= static_cast<std::size_t>(limit)) {
        return ensure_terminal(std::string(text::trim(input)));
    }

    std::vector<std::string> kept(words.begin(), words.begin() + limit);
    auto strip_trailing_punct = [](std::string& w) {
        while (!w.empty() && (w.back() == ',' || w.back() == ';' || w.back() == ':' ||
                              w.back() == '-')) {
            w.pop_back();
        }
    };
    strip_trailing_punct(kept.back());
    while (kept.size() > 1 &&
           (kept.back().empty() || dangling_words().contains(bare_word(kept.back())))) {
        kept.pop_back();
        strip_trailing_punct(kept.back());
    }

    std::string out;
    for (const auto& w : kept) {
        if (!out.empty()) out.push_back(' ');
        out += w;
    }
    return ensure_terminal(std::move(out));
}

std::vector<std::string> sentence_split(std::string_view input) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    auto push = [&](std::size_t end) {
        const auto piece = text::trim(input.substr(start, end - start));
        if (!piece.empty()) parts.emplace_back(piece);
        start = end;
    };
    std::size_t i = 0;
    while (i < input.size()) {
        const char c = input[i];
        if (!is_terminal(c) && c != ';') {
            ++i;
            continue;
        }
        std::size_t end = i + 1;
        while (end < input.size() && (is_terminal(input[end]) || input[end] == ';')) ++end;
        while (end < input.size() && is_closer(input[end])) ++end;
        const bool boundary = end == input.size() || text::is_space(input[end]);
        if (boundary && c == '.') {
            // Skip known abbreviations ("Dr.", "e.g.").
            std::size_t w = i;
            while (w > start && !text::is_space(input[w - 1])) --w;
            const std::string prev = text::to_lower(input.substr(w, i - w));
            if (abbreviations().contains(prev)) {
                i = end;
                continue;
            }
        }
        if (boundary) push(end);
        i = end;
    }
    push(input.size());
    return parts;
}

int word_budget(int step_idx) { return std::max(8, 28 - 2 * step_idx); }

int split_budget(int step_idx) { return std::max(10, word_budget(step_idx) - 4); }

std::vector<RuleCandidate> base_candidates_raw(std::string_view input, int step_idx,
                                               const Lexicon& lexicon) {
    if (step_idx < 0) throw InputError("base_candidates: step_idx must be >= 0");
    const std::string base(text::trim(input));
    const int lim = word_budget(step_idx);
    const std::string lim_s = std::to_string(lim);

    const std::string replaced = replace_words(base, lexicon);
    const std::string numbers = simplify_numbers_units(base);
    const std::string shortest = keep_shortest_clause(base);
    const std::string stripped = strip_relative_clauses(base);

    std::vector<RuleCandidate> out = {
        {replaced, "replace_words", std::nullopt},
        {numbers, "simplify_numbers_units", std::nullopt},
        {shortest, "keep_shortest_clause", std::nullopt},
        {stripped, "strip_relative_clauses", std::nullopt},
        {trim_to_limit(replaced, lim), "trim_to_limit(replace_words, " + lim_s + ")", lim},
        {trim_to_limit(numbers, lim), "trim_to_limit(simplify_numbers_units, " + lim_s + ")", lim},
        {trim_to_limit(stripped, lim), "trim_to_limit(strip_relative_clauses, " + lim_s + ")", lim},
        {trim_to_limit(keep_shortest_clause(replaced), lim),
         "trim_to_limit(keep_shortest_clause(replace_words), " + lim_s + ")", lim},
    };

    const int split_lim = split_budget(step_idx);
    const auto sentences = sentence_split(stripped);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        out.push_back({trim_to_limit(replace_words(sentences[i], lexicon), split_lim),
                       "trim_to_limit(replace_words(sentence " + std::to_string(i + 1) + "), " +
                           std::to_string(split_lim) + ")",
                       split_lim});
    }
    return out;
}

std::vector<RuleCandidate> base_candidates(std::string_view input, int step_idx,
                                           const Lexicon& lexicon) {
    const std::string base(text::trim(input));
    std::vector<RuleCandidate> out;
    std::unordered_set<std::string> seen;
    for (auto& c : base_candidates_raw(input, step_idx, lexicon)) {
        if (text::trim(c.text).empty() || c.text == base) continue;
        if (!seen.insert(c.text).second) continue;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace cefrsimp
