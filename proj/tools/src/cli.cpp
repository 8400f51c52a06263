#include "cefrsimp_cli/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "cefrsimp/errors.hpp"
#include "cefrsimp/eval.hpp"
#include "cefrsimp/io.hpp"
#include "cefrsimp/orchestrator.hpp"
#include "cefrsimp/text.hpp"

namespace cefrsimp::cli {
namespace {

struct ScorerFlags {
    std::string scorers = "builtin";
    std::string predictor;  // empty = follow --scorers
    std::string embedder;
    std::string llm;
    std::vector<std::string> predictor_fixtures;
    std::string llm_fixture;
    std::string lexicon;
};

struct Options {
    std::string config;
    std::string input;
    std::string output;
    std::string outputs;  // evaluate / gap-analysis: file to score
    std::string mode;
    std::string report;
    std::string format = "tsv";
    std::string text;
    int workers = 0;
    bool verbose = false;
    ScorerFlags scorers;
};

class UsageError : public Error {
public:
    using Error::Error;
};

PipelineConfig load_effective_config(const Options& o) {
    PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : load_config(o.config);
    if (!o.mode.empty()) cfg.mode = mode_from_string(o.mode);
    cfg.validate();
    return cfg;
}

std::string pick(const std::string& explicit_choice, const std::string& fallback) {
    return explicit_choice.empty() ? fallback : explicit_choice;
}

std::shared_ptr<const Ensemble> make_ensemble(const ScorerFlags& f, const PipelineConfig& cfg) {
    const auto kind = pick(f.predictor, f.scorers);
    if (kind == "builtin") return std::make_shared<Ensemble>(make_builtin_ensemble());
    if (kind == "http") return std::make_shared<Ensemble>(make_http_ensemble(cfg.endpoints));
    if (kind == "fixture") {
        if (f.predictor_fixtures.size() != 1 && f.predictor_fixtures.size() != 3) {
            throw UsageError("--predictor fixture needs --predictor-fixture once or three times");
        }
        std::array<std::shared_ptr<const LevelHead>, 3> heads;
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& path = f.predictor_fixtures[f.predictor_fixtures.size() == 1 ? 0 : i];
            heads[i] = std::make_shared<FixtureHead>(
                FixtureHead::from_file("fixture-" + std::to_string(i + 1), path));
        }
        return std::make_shared<Ensemble>(std::move(heads));
    }
    throw UsageError("unknown predictor backend '" + kind + "'");
}

std::shared_ptr<const Lexicon> make_lexicon(const ScorerFlags& f) {
    if (f.lexicon.empty()) {
        return std::shared_ptr<const Lexicon>(&default_lexicon(), [](const Lexicon*) {});
    }
    return std::make_shared<Lexicon>(load_lexicon(f.lexicon));
}

std::shared_ptr<const Embedder> make_embedder(const ScorerFlags& f, const PipelineConfig& cfg) {
    const auto kind = pick(f.embedder, f.scorers);
    if (kind == "builtin") {
        return std::make_shared<HashingEmbedder>(HashingEmbedder::kDefaultDimension, make_lexicon(f));
    }
    if (kind == "http") {
        if (cfg.endpoints.embedder_url.empty()) throw ConfigError("embedder_url is not configured");
        return std::make_shared<HttpEmbedder>(cfg.endpoints.embedder_url, cfg.endpoints.http_timeout_s,
                                              cfg.endpoints.http_max_inflight);
    }
    throw UsageError("unknown embedder backend '" + kind + "'");
}

std::shared_ptr<const LlmClient> make_llm(const ScorerFlags& f, const PipelineConfig& cfg) {
    std::string kind = f.llm;
    if (kind.empty()) {
        if (!f.llm_fixture.empty()) {
            kind = "fixture";
        } else {
            kind = f.scorers == "http" ? "http" : "none";
        }
    }
    if (kind == "none") return nullptr;
    if (kind == "fixture") {
        if (f.llm_fixture.empty()) throw UsageError("--llm fixture needs --llm-fixture");
        return std::make_shared<FixtureLlm>(FixtureLlm::from_file(f.llm_fixture));
    }
    if (kind == "http") return std::make_shared<ChatCompletionClient>(chat_options_from_config(cfg));
    throw UsageError("unknown LLM backend '" + kind + "'");
}

Scorers make_scorers(const ScorerFlags& f, const PipelineConfig& cfg, bool with_llm) {
    Scorers s;
    s.ensemble = make_ensemble(f, cfg);
    s.embedder = make_embedder(f, cfg);
    if (with_llm) s.llm = make_llm(f, cfg);
    s.lexicon = make_lexicon(f);
    s.prompt = std::shared_ptr<const PromptSpec>(&default_prompt_spec(), [](const PromptSpec*) {});
    return s;
}

int default_workers() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw InputError("failed writing " + path);
}

// Writes to --output when given, stdout otherwise.
void emit(const Options& o, std::ostream& out, const std::string& content) {
    if (o.output.empty()) {
        out << content;
    } else {
        write_text_file(o.output, content);
    }
}

int cmd_simplify(const Options& o, std::ostream& out) {
    const PipelineConfig cfg = load_effective_config(o);
    const auto tasks = read_tasks(o.input);
    const Engine engine(cfg, make_scorers(o.scorers, cfg, cfg.mode != Mode::kMrsRule));
    const int workers = o.workers > 0 ? o.workers : default_workers();

    auto result = engine.run(tasks, workers);
    auto records = completeness_check(tasks, to_output_records(result.outputs),
                                      [&engine](const SimplificationTask& t) {
                                          return engine.resolve(t).chosen.text;
                                      });
    write_outputs(o.output, records);

    const auto& rep = result.report;
    if (!o.report.empty()) write_text_file(o.report, report_to_json(rep).dump(2) + "\n");

    out << "mode\t" << to_string(rep.mode) << "\n";
    out << "tasks\t" << rep.task_count << "\n";
    out << "hits_per_retry\t";
    for (std::size_t i = 0; i < rep.per_retry_hits.size(); ++i) {
        out << (i ? "," : "") << rep.per_retry_hits[i];
    }
    out << "\n";
    out << "filled_by_nearest\t" << rep.filled_by_nearest << "\n";
    out << "fallbacks\t" << rep.fallbacks << "\n";
    out << "llm_calls\t" << rep.llm_calls << "\n";
    return kExitOk;
}

std::vector<EvalRecord> scored_records(const Options& o, const PipelineConfig& cfg) {
    const auto tasks = read_tasks(o.input);
    const auto outputs = read_outputs(o.outputs);
    const auto ensemble = make_ensemble(o.scorers, cfg);
    const auto embedder = make_embedder(o.scorers, cfg);
    return build_eval_records(tasks, outputs, *ensemble, *embedder);
}

int cmd_evaluate(const Options& o, std::ostream& out) {
    const PipelineConfig cfg = load_effective_config(o);
    const auto records = scored_records(o, cfg);
    const auto summary = summarize(records);
    std::optional<RunReport> run_report;
    if (!o.report.empty()) {
        std::ifstream in(o.report);
        if (!in) throw InputError("cannot open " + o.report);
        try {
            run_report = report_from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError(o.report + ": " + e.what());
        }
    }

    std::ostringstream buf;
    if (o.format == "json") {
        auto j = summary_to_json(summary);
        if (run_report) {
            nlohmann::json curve = nlohmann::json::array();
            for (const auto& [retry, hits] : retry_curve(*run_report)) {
                curve.push_back({{"retry", retry}, {"hits", hits}});
            }
            j["retry_curve"] = std::move(curve);
        }
        buf << j.dump(2) << "\n";
    } else {
        write_summary_tsv(buf, summary);
        buf << "\n";
        write_confusion_tsv(buf, summary.matrix);
        if (run_report) {
            buf << "\n";
            write_curve_tsv(buf, retry_curve(*run_report));
        }
    }
    emit(o, out, buf.str());
    return kExitOk;
}

int cmd_gap_analysis(const Options& o, std::ostream& out) {
    const PipelineConfig cfg = load_effective_config(o);
    const auto records = scored_records(o, cfg);
    if (records.empty()) throw InputError("no outputs to analyse");
    const auto rows = gap_analysis(records);
    std::ostringstream buf;
    if (o.format == "json") {
        buf << gap_rows_to_json(rows).dump(2) << "\n";
    } else {
        write_gap_tsv(buf, rows);
    }
    emit(o, out, buf.str());
    return kExitOk;
}

int cmd_predict_level(const Options& o, std::ostream& out) {
    std::string text = o.text;
    if (text.empty() && !o.input.empty()) {
        std::ifstream in(o.input, std::ios::binary);
        if (!in) throw InputError("cannot open " + o.input);
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    text = std::string(text::trim(text));
    if (text.empty()) throw UsageError("predict-level needs a nonempty --text or --input");

    const PipelineConfig cfg = load_effective_config(o);
    const auto ensemble = make_ensemble(o.scorers, cfg);
    const auto prediction = ensemble->predict(text);
    std::ostringstream buf;
    buf << std::fixed << std::setprecision(4);
    for (std::size_t i = 0; i < prediction.votes.size(); ++i) {
        buf << ensemble->heads()[i]->name() << '\t' << to_label(prediction.votes[i].level) << '\t'
            << prediction.votes[i].confidence << '\n';
    }
    buf << "resolved\t" << to_label(prediction.resolved) << '\n';
    emit(o, out, buf.str());
    return kExitOk;
}

void add_scorer_flags(CLI::App* cmd, ScorerFlags& f, bool with_llm) {
    cmd->add_option("--scorers", f.scorers, "Default backend for every scorer")
        ->check(CLI::IsMember({"builtin", "http"}));
    cmd->add_option("--predictor", f.predictor, "Level heads: builtin, http or fixture")
        ->check(CLI::IsMember({"builtin", "http", "fixture"}));
    cmd->add_option("--predictor-fixture", f.predictor_fixtures,
                    "JSONL votes {text,label,confidence}; once for all heads or three times");
    cmd->add_option("--embedder", f.embedder, "Embedder: builtin or http")
        ->check(CLI::IsMember({"builtin", "http"}));
    if (with_llm) {
        cmd->add_option("--llm", f.llm, "LLM: none, http or fixture")
            ->check(CLI::IsMember({"none", "http", "fixture"}));
        cmd->add_option("--llm-fixture", f.llm_fixture, "JSONL {prompt,completion} recordings");
    }
    cmd->add_option("--lexicon", f.lexicon, "TSV lexicon replacing the built-in one");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Readability-controlled text simplification", "cefrsimp"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "JSON config file");
    app.add_flag("-v,--verbose", o.verbose, "Log progress to stderr");

    auto* simplify = app.add_subcommand("simplify", "Simplify every task in a dataset");
    simplify->add_option("--input", o.input, "Dataset JSONL")->required();
    simplify->add_option("--output", o.output, "Output JSONL")->required();
    simplify->add_option("--mode", o.mode, "baseline, mrs-rule or mrs-joint")
        ->check(CLI::IsMember({"baseline", "mrs-rule", "mrs-joint"}));
    simplify->add_option("--workers", o.workers, "Parallel tasks (default: all cores)")
        ->check(CLI::PositiveNumber);
    simplify->add_option("--report", o.report, "Write the run report as JSON");
    add_scorer_flags(simplify, o.scorers, true);

    auto* evaluate = app.add_subcommand("evaluate", "RMSE, proxy similarity and confusion matrix");
    evaluate->add_option("--input", o.input, "Dataset JSONL")->required();
    evaluate->add_option("--outputs", o.outputs, "Outputs JSONL to score")->required();
    evaluate->add_option("--report", o.report, "Run report; adds the retry curve");
    evaluate->add_option("--format", o.format)->check(CLI::IsMember({"tsv", "json"}));
    evaluate->add_option("--output", o.output, "Write here instead of stdout");
    add_scorer_flags(evaluate, o.scorers, false);

    auto* gap = app.add_subcommand("gap-analysis", "Metrics grouped by source-target level gap");
    gap->add_option("--input", o.input, "Dataset JSONL")->required();
    gap->add_option("--outputs", o.outputs, "Outputs JSONL to score")->required();
    gap->add_option("--format", o.format)->check(CLI::IsMember({"tsv", "json"}));
    gap->add_option("--output", o.output, "Write here instead of stdout");
    add_scorer_flags(gap, o.scorers, false);

    auto* predict = app.add_subcommand("predict-level", "Per-head votes and the resolved level");
    predict->add_option("--text", o.text, "Text to classify");
    predict->add_option("--input", o.input, "File holding the text to classify");
    predict->add_option("--output", o.output, "Write here instead of stdout");
    add_scorer_flags(predict, o.scorers, false);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << "run 'cefrsimp --help' for usage\n";
        return kExitUsage;
    }

    if (o.verbose) spdlog::set_level(spdlog::level::info);

    try {
        if (simplify->parsed()) return cmd_simplify(o, out);
        if (evaluate->parsed()) return cmd_evaluate(o, out);
        if (gap->parsed()) return cmd_gap_analysis(o, out);
        return cmd_predict_level(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace cefrsimp::cli
