#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cefrsimp/cefr.hpp"
#include "cefrsimp/config.hpp"

namespace cefrsimp {

/// One input record.
struct SimplificationTask {
    std::string text_id;
    std::string original;
    CefrLevel target = CefrLevel::kA1;
    std::optional<std::string> reference;
};

/// Where a candidate text came from.
struct Provenance {
    enum class Kind { kOriginal, kRule, kLlm };

    Kind kind = Kind::kOriginal;
    // Rule chain, e.g. "trim_to_limit(replace_words, 22)". Empty otherwise.
    std::string description;
    // Word budget of the outermost trim_to_limit, when the chain ends in one.
    std::optional<int> word_budget;

    static Provenance original() { return {}; }
    static Provenance llm() { return {Kind::kLlm, "llm", std::nullopt}; }
    static Provenance rule(std::string chain, std::optional<int> budget = std::nullopt) {
        return {Kind::kRule, std::move(chain), budget};
    }
};

std::string_view to_string(Provenance::Kind kind) noexcept;

/// A simplification hypothesis. `predicted` must be set before `score`.
struct Candidate {
    std::string text;
    Provenance provenance;
    std::optional<CefrLevel> predicted;
    double sim_orig = 0.0;
    std::optional<double> sim_ref;
    std::optional<double> score;
};

enum class TaskStatus { kPending, kHit, kNearestFill, kFallback };

std::string_view to_string(TaskStatus status) noexcept;
TaskStatus task_status_from_string(std::string_view name);

/// Final decision for one task.
struct TaskResult {
    std::string text_id;
    Candidate chosen;
    TaskStatus status = TaskStatus::kPending;
};

/// Counters and schedule actually applied during a pipeline run.
struct RunReport {
    Mode mode = Mode::kMrsRule;
    std::size_t task_count = 0;
    // Cumulative number of tasks at their target after each retry.
    std::vector<std::size_t> per_retry_hits;
    // Similarity floor and step budget each retry ran with.
    std::vector<double> retry_floors;
    std::vector<int> retry_step_budgets;
    std::size_t filled_by_nearest = 0;
    std::size_t fallbacks = 0;
    std::size_t llm_calls = 0;
    std::size_t scorer_failures = 0;
    std::map<std::string, TaskStatus> per_task_status;
};

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

}  // namespace cefrsimp
