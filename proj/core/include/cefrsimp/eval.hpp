#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cefrsimp/cefr.hpp"
#include "cefrsimp/io.hpp"
#include "cefrsimp/predictor.hpp"
#include "cefrsimp/similarity.hpp"
#include "cefrsimp/types.hpp"

namespace cefrsimp {

struct EvalRecord {
    std::string text_id;
    CefrLevel target = CefrLevel::kA1;
    CefrLevel predicted = CefrLevel::kA1;
    CefrLevel source_level = CefrLevel::kA1;
    double sim_orig = 0.0;
    std::optional<double> sim_ref;
};

/// sqrt(mean((predicted - target)^2)). Throws InputError on empty input.
double rmse(std::span<const EvalRecord> records);

/// counts[target][predicted].
using ConfusionMatrix = std::array<std::array<std::size_t, kLevelCount>, kLevelCount>;

ConfusionMatrix confusion_matrix(std::span<const EvalRecord> records);

struct GapRow {
    int gap = 0;
    double rmse = 0.0;
    double mean_sim_orig = 0.0;
    std::optional<double> mean_sim_ref;
    std::size_t n = 0;
};

/// Rows ordered by ascending gap (source_level - target).
std::vector<GapRow> gap_analysis(std::span<const EvalRecord> records);

/// (1-based retry, cumulative hits).
std::vector<std::pair<int, std::size_t>> retry_curve(const RunReport& report);

/// Scores each output against its task: ensemble level of the output and of
/// the original, and proxy similarities. Throws InputError listing ids that
/// are missing from either side.
std::vector<EvalRecord> build_eval_records(std::span<const SimplificationTask> tasks,
                                           std::span<const OutputRecord> outputs,
                                           const Ensemble& ensemble, const Embedder& embedder);

struct EvalSummary {
    std::size_t n = 0;
    double rmse = 0.0;
    double mean_sim_orig = 0.0;
    std::optional<double> mean_sim_ref;
    ConfusionMatrix matrix{};
};

EvalSummary summarize(std::span<const EvalRecord> records);

// Tab-separated reports. Similarity columns carry a "(proxy)" suffix.
void write_summary_tsv(std::ostream& out, const EvalSummary& summary);
void write_confusion_tsv(std::ostream& out, const ConfusionMatrix& matrix);
void write_gap_tsv(std::ostream& out, std::span<const GapRow> rows);
void write_curve_tsv(std::ostream& out, std::span<const std::pair<int, std::size_t>> curve);

nlohmann::json summary_to_json(const EvalSummary& summary);
nlohmann::json gap_rows_to_json(std::span<const GapRow> rows);

}  // namespace cefrsimp
