#include "cefrsimp/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "cefrsimp/errors.hpp"
#include "cefrsimp/text.hpp"

namespace cefrsimp {
namespace {

constexpr int kFallbackWords = 28;

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
// thrown by any worker is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    const std::size_t threads =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

double round12(double x) { return std::round(x * 1e12) / 1e12; }

Candidate fallback_candidate(const SimplificationTask& task) {
    Candidate c;
    c.text = trim_to_limit(task.original, kFallbackWords);
    if (c.text.empty()) c.text = task.original;
    c.provenance = Provenance::original();
    c.provenance.description = "trim_to_limit(original, 28)";
    c.provenance.word_budget = kFallbackWords;
    return c;
}

}  // namespace

Scorers builtin_scorers() {
    Scorers s;
    s.ensemble = std::make_shared<Ensemble>(make_builtin_ensemble());
    s.lexicon = std::shared_ptr<const Lexicon>(&default_lexicon(), [](const Lexicon*) {});
    s.embedder = std::make_shared<HashingEmbedder>(HashingEmbedder::kDefaultDimension, s.lexicon);
    s.prompt = std::shared_ptr<const PromptSpec>(&default_prompt_spec(), [](const PromptSpec*) {});
    return s;
}

std::vector<RetryStep> make_retry_schedule(const PipelineConfig& cfg) {
    std::vector<RetryStep> out;
    out.reserve(static_cast<std::size_t>(cfg.max_retries));
    for (int r = 0; r < cfg.max_retries; ++r) {
        const double floor =
            std::max(cfg.sim_floor_min, round12(cfg.similarity_floor - r * cfg.floor_step));
        out.push_back({floor, cfg.max_steps + r * cfg.steps_step});
    }
    return out;
}

double score_candidate(const Candidate& c, const SimplificationTask& task,
                       const PipelineConfig& cfg) {
    if (!c.predicted) throw InternalError("score_candidate: candidate has no predicted level");
    if (c.sim_ref.has_value() != task.reference.has_value()) {
        throw InternalError("score_candidate: sim_ref must be set exactly when a reference exists");
    }
    const double hit = *c.predicted <= task.target ? 1.0 : 0.0;
    return cfg.w_hit * hit + cfg.w_ref * c.sim_ref.value_or(0.0) + cfg.w_orig * c.sim_orig -
           static_cast<double>(level_distance(*c.predicted, task.target));
}

bool ranks_before(const Candidate& a, const Candidate& b, CefrLevel target) {
    const double sa = a.score.value_or(-INFINITY);
    const double sb = b.score.value_or(-INFINITY);
    if (sa != sb) return sa > sb;
    const int da = a.predicted ? level_distance(*a.predicted, target) : kLevelCount;
    const int db = b.predicted ? level_distance(*b.predicted, target) : kLevelCount;
    if (da != db) return da < db;
    if (a.sim_orig != b.sim_orig) return a.sim_orig > b.sim_orig;
    if (a.text.size() != b.text.size()) return a.text.size() < b.text.size();
    return a.text < b.text;
}

Engine::Engine(PipelineConfig cfg, Scorers scorers)
    : cfg_(std::move(cfg)), scorers_(std::move(scorers)) {
    cfg_.validate();
    if (!scorers_.ensemble || !scorers_.embedder) {
        throw ConfigError("engine needs a level ensemble and an embedder");
    }
    if (!scorers_.lexicon) {
        scorers_.lexicon = std::shared_ptr<const Lexicon>(&default_lexicon(), [](const Lexicon*) {});
    }
    if (!scorers_.prompt) {
        scorers_.prompt =
            std::shared_ptr<const PromptSpec>(&default_prompt_spec(), [](const PromptSpec*) {});
    }
    const bool needs_llm = cfg_.mode == Mode::kBaseline || (cfg_.mode == Mode::kMrsJoint && cfg_.use_llm);
    if (needs_llm && !scorers_.llm) {
        throw ConfigError("mode " + std::string(to_string(cfg_.mode)) + " needs an LLM backend");
    }
    schedule_ = make_retry_schedule(cfg_);
}

std::optional<Candidate> Engine::make_candidate(TaskState& state, std::string text,
                                                Provenance provenance) const {
    auto it = state.memo.find(text);
    if (it == state.memo.end()) {
        TaskState::Scored scored;
        if (state.original_embedding) {
            try {
                const auto level = scorers_.ensemble->predict_level(text);
                const auto vec = scorers_.embedder->embed(text);
                scored.sim_orig = cosine_sim(*state.original_embedding, vec);
                if (state.reference_embedding) {
                    scored.sim_ref = cosine_sim(*state.reference_embedding, vec);
                }
                scored.predicted = level;
            } catch (const ScorerError& e) {
                ++state.scorer_failures;
                spdlog::debug("{}: dropping candidate: {}", state.task.text_id, e.what());
            }
        }
        it = state.memo.emplace(text, scored).first;
    }
    if (!it->second.predicted) return std::nullopt;

    Candidate c;
    c.text = std::move(text);
    c.provenance = std::move(provenance);
    c.predicted = it->second.predicted;
    c.sim_orig = it->second.sim_orig;
    c.sim_ref = it->second.sim_ref;
    c.score = score_candidate(c, state.task, cfg_);
    return c;
}

std::optional<Candidate> Engine::llm_candidate(TaskState& state) const {
    if (!state.llm_attempted) {
        state.llm_attempted = true;
        ++state.llm_calls;
        try {
            state.llm_text = call_llm(*scorers_.llm, build_prompt(*scorers_.prompt, state.task));
        } catch (const LlmError& e) {
            spdlog::warn("{}: no LLM candidate: {}", state.task.text_id, e.what());
        }
    }
    if (!state.llm_text) return std::nullopt;
    return make_candidate(state, *state.llm_text, Provenance::llm());
}

TaskState Engine::start_task(const SimplificationTask& task) const {
    TaskState state;
    state.task = task;
    state.seed = task.original;
    try {
        state.original_embedding = scorers_.embedder->embed(task.original);
        if (task.reference) state.reference_embedding = scorers_.embedder->embed(*task.reference);
    } catch (const ScorerError& e) {
        ++state.scorer_failures;
        state.original_embedding.reset();
        spdlog::warn("{}: cannot embed task texts: {}", task.text_id, e.what());
        return state;
    }

    auto original = make_candidate(state, task.original, Provenance::original());
    if (!original) return state;
    state.source_level = original->predicted;
    if (cfg_.mode != Mode::kBaseline && *original->predicted <= task.target) {
        state.status = TaskStatus::kHit;
        state.best = std::move(original);
    }
    return state;
}

void Engine::run_round(TaskState& state, int retry_idx) const {
    if (retry_idx < 0 || retry_idx >= cfg_.max_retries) {
        throw InputError("run_round: retry index " + std::to_string(retry_idx) + " out of range");
    }
    if (state.status != TaskStatus::kPending) return;

    const RetryStep& step = schedule_[static_cast<std::size_t>(retry_idx)];
    const CefrLevel target = state.task.target;
    state.seed = state.task.original;

    if (auto entry = make_candidate(state, state.seed, Provenance::original());
        entry && *entry->predicted == target) {
        state.best = std::move(entry);
        state.status = TaskStatus::kHit;
        return;
    }

    const bool with_llm = cfg_.mode == Mode::kMrsJoint && cfg_.use_llm && retry_idx == 0;
    for (int s = 0; s < step.step_budget; ++s) {
        std::vector<Candidate> round;
        if (with_llm && s == 0) {
            if (auto c = llm_candidate(state)) round.push_back(std::move(*c));
        }
        for (auto& rc : base_candidates(state.seed, s, *scorers_.lexicon)) {
            if (auto c = make_candidate(state, std::move(rc.text),
                                        Provenance::rule(std::move(rc.chain), rc.word_budget))) {
                round.push_back(std::move(*c));
            }
        }

        const Candidate* best = nullptr;
        for (const auto& c : round) {
            if (state.pooled_texts.insert(c.text).second) state.pool.push_back(c);
            if (c.sim_orig < step.floor) continue;
            if (!best || ranks_before(c, *best, target)) best = &c;
        }
        if (!best) continue;

        state.seed = best->text;
        state.best = *best;
        if (*best->predicted == target) {
            state.status = TaskStatus::kHit;
            return;
        }
    }
}

Candidate Engine::nearest_level_fill(const TaskState& state) const {
    const CefrLevel target = state.task.target;
    const Candidate* best = nullptr;
    auto closer = [target](const Candidate& a, const Candidate& b) {
        const int da = level_distance(*a.predicted, target);
        const int db = level_distance(*b.predicted, target);
        if (da != db) return da < db;
        if (a.sim_orig != b.sim_orig) return a.sim_orig > b.sim_orig;
        if (*a.predicted != *b.predicted) return *a.predicted < *b.predicted;
        if (a.text.size() != b.text.size()) return a.text.size() < b.text.size();
        return a.text < b.text;
    };
    for (const auto& c : state.pool) {
        if (!c.predicted || c.sim_orig < cfg_.sim_floor_min) continue;
        if (!best || closer(c, *best)) best = &c;
    }
    if (best) return *best;
    return fallback_candidate(state.task);
}

TaskResult Engine::finish(TaskState& state) const {
    TaskResult result;
    result.text_id = state.task.text_id;
    if (state.status == TaskStatus::kHit && state.best) {
        result.chosen = *state.best;
        result.status = TaskStatus::kHit;
        return result;
    }
    result.chosen = nearest_level_fill(state);
    result.status = result.chosen.provenance.kind == Provenance::Kind::kOriginal
                        ? TaskStatus::kFallback
                        : TaskStatus::kNearestFill;
    state.status = result.status;
    return result;
}

TaskResult Engine::resolve(const SimplificationTask& task) const {
    if (cfg_.mode == Mode::kBaseline) {
        return run_baseline(std::span<const SimplificationTask>(&task, 1), 1).outputs.front();
    }
    TaskState state = start_task(task);
    for (int r = 0; r < cfg_.max_retries && state.status == TaskStatus::kPending; ++r) {
        run_round(state, r);
    }
    return finish(state);
}

PipelineResult Engine::run_baseline(std::span<const SimplificationTask> tasks, int workers) const {
    std::vector<TaskResult> outputs(tasks.size());
    std::vector<TaskState> states(tasks.size());
    parallel_for(tasks.size(), workers, [&](std::size_t i) {
        TaskState& state = states[i];
        state = start_task(tasks[i]);
        TaskResult& out = outputs[i];
        out.text_id = tasks[i].text_id;

        std::optional<Candidate> c;
        if (state.original_embedding) {
            c = llm_candidate(state);
        } else {
            // Still one call per task, even when scoring is unavailable.
            state.llm_attempted = true;
            ++state.llm_calls;
            try {
                state.llm_text = call_llm(*scorers_.llm, build_prompt(*scorers_.prompt, tasks[i]));
            } catch (const LlmError& e) {
                spdlog::warn("{}: no LLM candidate: {}", tasks[i].text_id, e.what());
            }
        }
        if (c) {
            out.chosen = *c;
            out.status = *c->predicted == tasks[i].target ? TaskStatus::kHit : TaskStatus::kNearestFill;
        } else if (state.llm_text) {
            out.chosen.text = *state.llm_text;
            out.chosen.provenance = Provenance::llm();
            out.status = TaskStatus::kNearestFill;
        } else {
            out.chosen = fallback_candidate(tasks[i]);
            out.status = TaskStatus::kFallback;
        }
    });

    PipelineResult result;
    auto& report = result.report;
    report.mode = cfg_.mode;
    report.task_count = tasks.size();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        report.llm_calls += states[i].llm_calls;
        report.scorer_failures += states[i].scorer_failures;
        report.per_task_status[outputs[i].text_id] = outputs[i].status;
        if (outputs[i].status == TaskStatus::kHit) ++hits;
        if (outputs[i].status == TaskStatus::kNearestFill) ++report.filled_by_nearest;
        if (outputs[i].status == TaskStatus::kFallback) ++report.fallbacks;
    }
    report.per_retry_hits.push_back(hits);
    std::stable_sort(outputs.begin(), outputs.end(),
                     [](const TaskResult& a, const TaskResult& b) { return a.text_id < b.text_id; });
    result.outputs = std::move(outputs);
    return result;
}

PipelineResult Engine::run(std::span<const SimplificationTask> tasks, int workers) const {
    {
        std::set<std::string_view> ids;
        for (const auto& t : tasks) {
            if (!ids.insert(t.text_id).second) {
                throw InputError("duplicate text_id '" + t.text_id + "'");
            }
        }
    }
    if (cfg_.mode == Mode::kBaseline) return run_baseline(tasks, workers);

    std::vector<TaskState> states(tasks.size());
    parallel_for(tasks.size(), workers, [&](std::size_t i) { states[i] = start_task(tasks[i]); });

    if (!states.empty() && std::all_of(states.begin(), states.end(), [](const TaskState& s) {
            return !s.source_level.has_value();
        })) {
        throw ScorerError("pipeline", "every task failed to score at start; scorer backend unavailable");
    }

    PipelineResult result;
    auto& report = result.report;
    report.mode = cfg_.mode;
    report.task_count = tasks.size();
    for (const auto& step : schedule_) {
        report.retry_floors.push_back(step.floor);
        report.retry_step_budgets.push_back(step.step_budget);
    }

    for (int r = 0; r < cfg_.max_retries; ++r) {
        std::vector<std::size_t> pending;
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (states[i].status == TaskStatus::kPending) pending.push_back(i);
        }
        parallel_for(pending.size(), workers, [&](std::size_t k) { run_round(states[pending[k]], r); });
        const auto hits = static_cast<std::size_t>(std::count_if(
            states.begin(), states.end(),
            [](const TaskState& s) { return s.status == TaskStatus::kHit; }));
        report.per_retry_hits.push_back(hits);
    }

    result.outputs.reserve(states.size());
    for (auto& state : states) {
        result.outputs.push_back(finish(state));
        const auto& out = result.outputs.back();
        report.per_task_status[out.text_id] = out.status;
        report.llm_calls += state.llm_calls;
        report.scorer_failures += state.scorer_failures;
        if (out.status == TaskStatus::kNearestFill) ++report.filled_by_nearest;
        if (out.status == TaskStatus::kFallback) ++report.fallbacks;
    }
    std::stable_sort(result.outputs.begin(), result.outputs.end(),
                     [](const TaskResult& a, const TaskResult& b) { return a.text_id < b.text_id; });
    return result;
}

PipelineResult run_pipeline(std::span<const SimplificationTask> tasks, const PipelineConfig& cfg,
                            const Scorers& scorers, int workers) {
    return Engine(cfg, scorers).run(tasks, workers);
}

}  // namespace cefrsimp
