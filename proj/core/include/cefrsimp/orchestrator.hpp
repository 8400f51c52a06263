#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cefrsimp/config.hpp"
#include "cefrsimp/llm.hpp"
#include "cefrsimp/predictor.hpp"
#include "cefrsimp/rules.hpp"
#include "cefrsimp/similarity.hpp"
#include "cefrsimp/types.hpp"

namespace cefrsimp {

/// Backends the engine scores and generates with. `llm` may be null when
/// the mode never calls it.
struct Scorers {
    std::shared_ptr<const Ensemble> ensemble;
    std::shared_ptr<const Embedder> embedder;
    std::shared_ptr<const LlmClient> llm;
    std::shared_ptr<const Lexicon> lexicon;
    std::shared_ptr<const PromptSpec> prompt;
};

/// Built-in heads and embedder, default lexicon and prompt, no LLM.
Scorers builtin_scorers();

struct RetryStep {
    double floor = 0.0;
    int step_budget = 0;
};

/// floor_r = max(sim_floor_min, similarity_floor - r * floor_step),
/// budget_r = max_steps + r * steps_step, for r in [0, max_retries).
/// Floors are rounded to 12 decimals so decimal configs give decimal floors.
std::vector<RetryStep> make_retry_schedule(const PipelineConfig& cfg);

/// w_hit * [predicted <= target] + w_ref * sim_ref + w_orig * sim_orig
///   - |predicted - target|.
/// Throws InternalError if the candidate was never predicted, or if
/// sim_ref presence disagrees with the task's reference.
double score_candidate(const Candidate& c, const SimplificationTask& task,
                       const PipelineConfig& cfg);

/// In-round ranking: higher score, then smaller level distance, larger
/// sim_orig, shorter text, lexicographically smaller text.
bool ranks_before(const Candidate& a, const Candidate& b, CefrLevel target);

struct TaskState {
    SimplificationTask task;
    std::string seed;
    std::vector<Candidate> pool;
    std::optional<Candidate> best;
    TaskStatus status = TaskStatus::kPending;
    std::optional<CefrLevel> source_level;
    std::size_t llm_calls = 0;
    std::size_t scorer_failures = 0;

    struct Scored {
        std::optional<CefrLevel> predicted;
        double sim_orig = 0.0;
        std::optional<double> sim_ref;
    };
    // Per-task memo of scored texts (nullopt level = scorer failure).
    std::unordered_map<std::string, Scored> memo;
    std::unordered_set<std::string> pooled_texts;
    std::optional<EmbeddingVector> original_embedding;
    std::optional<EmbeddingVector> reference_embedding;
    bool llm_attempted = false;
    std::optional<std::string> llm_text;
};

struct PipelineResult {
    std::vector<TaskResult> outputs;  // sorted by text_id
    RunReport report;
};

/// The multi-round simplification engine.
class Engine {
public:
    /// Validates `cfg`; throws ConfigError if the mode needs an LLM that is
    /// missing.
    Engine(PipelineConfig cfg, Scorers scorers);

    const PipelineConfig& config() const noexcept { return cfg_; }
    const std::vector<RetryStep>& schedule() const noexcept { return schedule_; }

    /// Predicts the original. A task already at or below its target becomes
    /// a hit carrying the unchanged original.
    TaskState start_task(const SimplificationTask& task) const;

    /// One retry: restart from the original, then up to step_budget steps of
    /// generate -> score -> gate -> select. Stops on a hit.
    void run_round(TaskState& state, int retry_idx) const;

    /// Closest-level pooled candidate with sim_orig >= sim_floor_min, or the
    /// original trimmed to 28 words when none qualifies.
    Candidate nearest_level_fill(const TaskState& state) const;

    /// start_task, all retries, then nearest-level fill, for one task.
    TaskResult resolve(const SimplificationTask& task) const;

    /// Throws InputError on duplicate text_ids, ScorerError if every scorer
    /// call at task start failed.
    PipelineResult run(std::span<const SimplificationTask> tasks, int workers = 1) const;

private:
    std::optional<Candidate> make_candidate(TaskState& state, std::string text,
                                            Provenance provenance) const;
    std::optional<Candidate> llm_candidate(TaskState& state) const;
    PipelineResult run_baseline(std::span<const SimplificationTask> tasks, int workers) const;
    TaskResult finish(TaskState& state) const;

    PipelineConfig cfg_;
    Scorers scorers_;
    std::vector<RetryStep> schedule_;
};

PipelineResult run_pipeline(std::span<const SimplificationTask> tasks, const PipelineConfig& cfg,
                            const Scorers& scorers, int workers = 1);

}  // namespace cefrsimp
