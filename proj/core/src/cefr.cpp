#include "cefrsimp/cefr.hpp"

#include <string>

#include "cefrsimp/errors.hpp"
#include "cefrsimp/text.hpp"

namespace cefrsimp {
namespace {

constexpr std::array<std::string_view, kLevelCount> kLabels = {"A1", "A2", "B1",
                                                                "B2", "C1", "C2"};

char upper(char c) { return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c; }

}  // namespace

CefrLevel level_from_ordinal(int value) {
    if (value < 0 || value >= kLevelCount) {
        throw InputError("CEFR ordinal out of range: " + std::to_string(value));
    }
    return static_cast<CefrLevel>(value);
}

CefrLevel level_from_label(std::string_view raw) {
    const std::string_view label = text::trim(raw);
    if (label.size() == 2) {
        const char letter = upper(label[0]);
        const char digit = label[1];
        for (int i = 0; i < kLevelCount; ++i) {
            if (kLabels[i][0] == letter && kLabels[i][1] == digit) {
                return static_cast<CefrLevel>(i);
            }
        }
    }
    throw InputError("unknown CEFR label '" + std::string(raw) + "'");
}

std::string_view to_label(CefrLevel level) noexcept { return kLabels[ordinal(level)]; }

}  // namespace cefrsimp
