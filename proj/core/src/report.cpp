#include <string>

#include "cefrsimp/errors.hpp"
#include "cefrsimp/types.hpp"

namespace cefrsimp {

using nlohmann::json;

std::string_view to_string(Provenance::Kind kind) noexcept {
    switch (kind) {
        case Provenance::Kind::kOriginal: return "original";
        case Provenance::Kind::kRule: return "rule";
        case Provenance::Kind::kLlm: return "llm";
    }
    return "original";
}

std::string_view to_string(TaskStatus status) noexcept {
    switch (status) {
        case TaskStatus::kPending: return "pending";
        case TaskStatus::kHit: return "hit";
        case TaskStatus::kNearestFill: return "nearest-fill";
        case TaskStatus::kFallback: return "fallback";
    }
    return "pending";
}

TaskStatus task_status_from_string(std::string_view name) {
    if (name == "pending") return TaskStatus::kPending;
    if (name == "hit") return TaskStatus::kHit;
    if (name == "nearest-fill") return TaskStatus::kNearestFill;
    if (name == "fallback") return TaskStatus::kFallback;
    throw InputError("unknown task status '" + std::string(name) + "'");
}

json report_to_json(const RunReport& report) {
    json statuses = json::object();
    for (const auto& [id, status] : report.per_task_status) {
        statuses[id] = std::string(to_string(status));
    }
    return json{
        {"mode", std::string(to_string(report.mode))},
        {"task_count", report.task_count},
        {"per_retry_hits", report.per_retry_hits},
        {"retry_floors", report.retry_floors},
        {"retry_step_budgets", report.retry_step_budgets},
        {"filled_by_nearest", report.filled_by_nearest},
        {"fallbacks", report.fallbacks},
        {"llm_calls", report.llm_calls},
        {"scorer_failures", report.scorer_failures},
        {"per_task_status", std::move(statuses)},
    };
}

RunReport report_from_json(const json& j) {
    try {
        RunReport r;
        r.mode = mode_from_string(j.at("mode").get<std::string>());
        r.task_count = j.at("task_count").get<std::size_t>();
        r.per_retry_hits = j.at("per_retry_hits").get<std::vector<std::size_t>>();
        r.retry_floors = j.at("retry_floors").get<std::vector<double>>();
        r.retry_step_budgets = j.at("retry_step_budgets").get<std::vector<int>>();
        r.filled_by_nearest = j.at("filled_by_nearest").get<std::size_t>();
        r.fallbacks = j.at("fallbacks").get<std::size_t>();
        r.llm_calls = j.at("llm_calls").get<std::size_t>();
        r.scorer_failures = j.value("scorer_failures", std::size_t{0});
        for (const auto& [id, status] : j.at("per_task_status").items()) {
            r.per_task_status[id] = task_status_from_string(status.get<std::string>());
        }
        return r;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed run report: ") + e.what());
    }
}

}  // namespace cefrsimp
