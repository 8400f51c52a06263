#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "cefrsimp/predictor.hpp"

namespace cefrsimp::testing {

/// Literal, deliberately naive statement of the three-head cascade, kept
/// independent of resolve_vote for cross-checking.
inline CefrLevel oracle_resolve(const std::array<HeadVote, 3>& votes) {
    std::vector<CefrLevel> labels;
    for (const auto& v : votes) {
        if (std::find(labels.begin(), labels.end(), v.level) == labels.end()) {
            labels.push_back(v.level);
        }
    }
    auto votes_for = [&](CefrLevel l) {
        return std::count_if(votes.begin(), votes.end(), [&](const HeadVote& v) { return v.level == l; });
    };
    auto sum_for = [&](CefrLevel l) {
        double s = 0.0;
        for (const auto& v : votes) {
            if (v.level == l) s += v.confidence;
        }
        return s;
    };
    auto peak_for = [&](CefrLevel l) {
        double p = 0.0;
        for (const auto& v : votes) {
            if (v.level == l) p = std::max(p, v.confidence);
        }
        return p;
    };
    auto keep_max = [&](auto key) {
        double best = -1.0;
        for (auto l : labels) best = std::max(best, static_cast<double>(key(l)));
        std::vector<CefrLevel> kept;
        for (auto l : labels) {
            if (static_cast<double>(key(l)) == best) kept.push_back(l);
        }
        labels = kept;
    };

    // (1) most votes
    keep_max(votes_for);
    if (labels.size() == 1) return labels.front();
    // (2) largest summed confidence among the tied labels
    keep_max(sum_for);
    if (labels.size() == 1) return labels.front();
    // (3) highest single confidence
    keep_max(peak_for);
    if (labels.size() == 1) return labels.front();
    // (4) the simpler level
    return *std::min_element(labels.begin(), labels.end());
}

}  // namespace cefrsimp::testing
