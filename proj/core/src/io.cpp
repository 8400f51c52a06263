#include "cefrsimp/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cefrsimp/errors.hpp"
#include "cefrsimp/rules.hpp"
#include "cefrsimp/text.hpp"

namespace cefrsimp {
namespace {

using nlohmann::json;

std::string line_error(int line_no, const std::string& what) {
    return "line " + std::to_string(line_no) + ": " + what;
}

std::string required_string(const json& j, const char* key, int line_no) {
    auto it = j.find(key);
    if (it == j.end()) throw InputError(line_error(line_no, std::string("missing '") + key + "'"));
    if (!it->is_string()) {
        throw InputError(line_error(line_no, std::string("'") + key + "' must be a string"));
    }
    return it->get<std::string>();
}

template <typename Fn>
void for_each_json_line(std::istream& in, Fn&& fn) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw InputError(line_error(line_no, std::string("invalid JSON: ") + e.what()));
        }
        if (!j.is_object()) throw InputError(line_error(line_no, "expected a JSON object"));
        fn(j, line_no);
    }
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return in;
}

std::string flatten_newlines(std::string s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\r' || s[i] == '\n') {
            if (s[i] == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ++i;
            out += ' ';
        } else {
            out += s[i];
        }
    }
    return out;
}

}  // namespace

std::vector<SimplificationTask> parse_tasks(std::istream& in) {
    std::vector<SimplificationTask> tasks;
    std::unordered_set<std::string> seen;
    for_each_json_line(in, [&](const json& j, int line_no) {
        SimplificationTask t;
        t.text_id = required_string(j, "text_id", line_no);
        t.original = required_string(j, "original", line_no);
        const auto label = required_string(j, "target_cefr", line_no);
        try {
            t.target = level_from_label(label);
        } catch (const InputError& e) {
            throw InputError(line_error(line_no, e.what()));
        }
        if (auto it = j.find("reference"); it != j.end() && !it->is_null()) {
            if (!it->is_string()) throw InputError(line_error(line_no, "'reference' must be a string"));
            t.reference = it->get<std::string>();
        }
        if (t.text_id.empty()) throw InputError(line_error(line_no, "empty text_id"));
        if (text::trim(t.original).empty()) throw InputError(line_error(line_no, "empty original"));
        if (!seen.insert(t.text_id).second) {
            throw InputError(line_error(line_no, "duplicate text_id '" + t.text_id + "'"));
        }
        tasks.push_back(std::move(t));
    });
    return tasks;
}

std::vector<SimplificationTask> read_tasks(const std::filesystem::path& path) {
    auto in = open_input(path);
    try {
        return parse_tasks(in);
    } catch (const InputError& e) {
        throw InputError(path.string() + " " + e.what());
    }
}

std::vector<OutputRecord> parse_outputs(std::istream& in) {
    std::vector<OutputRecord> out;
    std::unordered_set<std::string> seen;
    for_each_json_line(in, [&](const json& j, int line_no) {
        OutputRecord r{required_string(j, "text_id", line_no),
                       required_string(j, "simplified_sentence", line_no)};
        if (!seen.insert(r.text_id).second) {
            throw InputError(line_error(line_no, "duplicate text_id '" + r.text_id + "'"));
        }
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<OutputRecord> read_outputs(const std::filesystem::path& path) {
    auto in = open_input(path);
    try {
        return parse_outputs(in);
    } catch (const InputError& e) {
        throw InputError(path.string() + " " + e.what());
    }
}

void emit_outputs(std::ostream& out, std::span<const OutputRecord> outputs) {
    for (const auto& r : outputs) {
        // Built by hand so the key order is fixed.
        out << "{\"text_id\": " << json(r.text_id).dump()
            << ", \"simplified_sentence\": " << json(flatten_newlines(r.simplified_sentence)).dump()
            << "}\n";
    }
}

void write_outputs(const std::filesystem::path& path, std::span<const OutputRecord> outputs) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::filesystem::filesystem_error("cannot open for writing", path,
                                                std::make_error_code(std::errc::io_error));
    }
    emit_outputs(out, outputs);
    out.flush();
    if (!out) {
        throw std::filesystem::filesystem_error("write failed", path,
                                                std::make_error_code(std::errc::io_error));
    }
}

std::vector<OutputRecord> sort_outputs(std::vector<OutputRecord> outputs) {
    std::stable_sort(outputs.begin(), outputs.end(),
                     [](const OutputRecord& a, const OutputRecord& b) { return a.text_id < b.text_id; });
    return outputs;
}

std::vector<OutputRecord> to_output_records(std::span<const TaskResult> results) {
    std::vector<OutputRecord> out;
    out.reserve(results.size());
    for (const auto& r : results) out.push_back({r.text_id, r.chosen.text});
    return out;
}

std::vector<OutputRecord> completeness_check(std::span<const SimplificationTask> inputs,
                                             std::vector<OutputRecord> outputs,
                                             const TaskResolver& repair) {
    std::map<std::string, std::string, std::less<>> by_id;
    std::set<std::string, std::less<>> wanted;
    for (const auto& t : inputs) wanted.insert(t.text_id);
    for (auto& r : outputs) {
        if (!wanted.contains(r.text_id)) continue;
        by_id.try_emplace(r.text_id, std::move(r.simplified_sentence));
    }
    for (const auto& t : inputs) {
        if (by_id.contains(t.text_id)) continue;
        std::string text;
        try {
            if (repair) text = repair(t);
        } catch (const std::exception&) {
            text.clear();
        }
        if (text::trim(text).empty()) text = trim_to_limit(t.original, 28);
        by_id.emplace(t.text_id, std::move(text));
    }
    std::vector<OutputRecord> result;
    result.reserve(by_id.size());
    for (auto& [id, text] : by_id) result.push_back({id, std::move(text)});
    return result;
}

}  // namespace cefrsimp
