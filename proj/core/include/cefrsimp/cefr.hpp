#pragma once

#include <array>
#include <string_view>

namespace cefrsimp {

/// CEFR proficiency level. The underlying value is the ordinal used for
/// all level arithmetic (A1 = 0 ... C2 = 5).
enum class CefrLevel : int { kA1 = 0, kA2 = 1, kB1 = 2, kB2 = 3, kC1 = 4, kC2 = 5 };

inline constexpr std::array<CefrLevel, 6> kAllLevels = {
    CefrLevel::kA1, CefrLevel::kA2, CefrLevel::kB1,
    CefrLevel::kB2, CefrLevel::kC1, CefrLevel::kC2};

inline constexpr int kLevelCount = 6;

constexpr int ordinal(CefrLevel level) noexcept { return static_cast<int>(level); }

/// Throws InputError when `value` is outside [0, 5].
CefrLevel level_from_ordinal(int value);

/// Case-insensitive parse of "A1".."C2", ignoring surrounding whitespace.
/// Throws InputError naming the label.
CefrLevel level_from_label(std::string_view label);

/// Upper-case label, e.g. "B2".
std::string_view to_label(CefrLevel level) noexcept;

/// source - target; positive when the source is harder than the target.
constexpr int cefr_gap(CefrLevel source, CefrLevel target) noexcept {
    return ordinal(source) - ordinal(target);
}

constexpr int level_distance(CefrLevel a, CefrLevel b) noexcept {
    const int gap = cefr_gap(a, b);
    return gap < 0 ? -gap : gap;
}

}  // namespace cefrsimp
