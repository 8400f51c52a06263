#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cefrsimp/types.hpp"

namespace cefrsimp {

/// One line of an output file: exactly {text_id, simplified_sentence}.
struct OutputRecord {
    std::string text_id;
    std::string simplified_sentence;

    bool operator==(const OutputRecord&) const = default;
};

/// Line-delimited JSON objects with text_id, original, target_cefr and an
/// optional reference. Blank lines are skipped. Throws InputError naming the
/// 1-based line on malformed records and on duplicate text_ids.
std::vector<SimplificationTask> parse_tasks(std::istream& in);
std::vector<SimplificationTask> read_tasks(const std::filesystem::path& path);

/// Same line rules as parse_tasks, for {text_id, simplified_sentence}.
std::vector<OutputRecord> parse_outputs(std::istream& in);
std::vector<OutputRecord> read_outputs(const std::filesystem::path& path);

/// One object per line with keys in the order text_id, simplified_sentence.
/// Internal newlines become single spaces.
void emit_outputs(std::ostream& out, std::span<const OutputRecord> outputs);
/// Throws std::filesystem::filesystem_error on failure to open or write.
void write_outputs(const std::filesystem::path& path, std::span<const OutputRecord> outputs);

/// Stable ascending byte-wise sort on text_id.
std::vector<OutputRecord> sort_outputs(std::vector<OutputRecord> outputs);

std::vector<OutputRecord> to_output_records(std::span<const TaskResult> results);

/// Produces the replacement text for a missing id. May throw.
using TaskResolver = std::function<std::string(const SimplificationTask&)>;

/// Ensures every input id has exactly one output. Missing ids are resolved
/// with `repair`; if that throws, the original trimmed to 28 words is used.
/// Outputs whose id is not an input are dropped. Result is sorted.
std::vector<OutputRecord> completeness_check(std::span<const SimplificationTask> inputs,
                                             std::vector<OutputRecord> outputs,
                                             const TaskResolver& repair);

}  // namespace cefrsimp
