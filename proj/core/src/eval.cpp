#include "cefrsimp/eval.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

#include "cefrsimp/errors.hpp"

namespace cefrsimp {
namespace {

std::string fixed(double x, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << x;
    return os.str();
}

double squared_error(const EvalRecord& r) {
    const double d = ordinal(r.predicted) - ordinal(r.target);
    return d * d;
}

}  // namespace

double rmse(std::span<const EvalRecord> records) {
    if (records.empty()) throw InputError("rmse of an empty record set");
    double sum = 0.0;
    for (const auto& r : records) sum += squared_error(r);
    return std::sqrt(sum / static_cast<double>(records.size()));
}

ConfusionMatrix confusion_matrix(std::span<const EvalRecord> records) {
    ConfusionMatrix m{};
    for (const auto& r : records) {
        ++m[static_cast<std::size_t>(ordinal(r.target))][static_cast<std::size_t>(ordinal(r.predicted))];
    }
    return m;
}

std::vector<GapRow> gap_analysis(std::span<const EvalRecord> records) {
    struct Acc {
        double sq = 0.0, sim_orig = 0.0, sim_ref = 0.0;
        std::size_t n = 0, n_ref = 0;
    };
    std::map<int, Acc> groups;
    for (const auto& r : records) {
        auto& a = groups[cefr_gap(r.source_level, r.target)];
        a.sq += squared_error(r);
        a.sim_orig += r.sim_orig;
        if (r.sim_ref) {
            a.sim_ref += *r.sim_ref;
            ++a.n_ref;
        }
        ++a.n;
    }
    std::vector<GapRow> rows;
    rows.reserve(groups.size());
    for (const auto& [gap, a] : groups) {
        GapRow row;
        row.gap = gap;
        row.n = a.n;
        row.rmse = std::sqrt(a.sq / static_cast<double>(a.n));
        row.mean_sim_orig = a.sim_orig / static_cast<double>(a.n);
        if (a.n_ref > 0) row.mean_sim_ref = a.sim_ref / static_cast<double>(a.n_ref);
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::pair<int, std::size_t>> retry_curve(const RunReport& report) {
    std::vector<std::pair<int, std::size_t>> curve;
    curve.reserve(report.per_retry_hits.size());
    for (std::size_t i = 0; i < report.per_retry_hits.size(); ++i) {
        curve.emplace_back(static_cast<int>(i) + 1, report.per_retry_hits[i]);
    }
    return curve;
}

std::vector<EvalRecord> build_eval_records(std::span<const SimplificationTask> tasks,
                                           std::span<const OutputRecord> outputs,
                                           const Ensemble& ensemble, const Embedder& embedder) {
    std::unordered_map<std::string_view, const OutputRecord*> by_id;
    for (const auto& o : outputs) by_id.emplace(o.text_id, &o);

    std::vector<std::string> missing;
    for (const auto& t : tasks) {
        if (!by_id.contains(t.text_id)) missing.push_back(t.text_id);
    }
    std::vector<std::string> extra;
    {
        std::unordered_map<std::string_view, bool> task_ids;
        for (const auto& t : tasks) task_ids.emplace(t.text_id, true);
        for (const auto& o : outputs) {
            if (!task_ids.contains(o.text_id)) extra.push_back(o.text_id);
        }
    }
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "outputs do not match inputs;";
        auto list = [&msg](const char* label, const std::vector<std::string>& ids) {
            if (ids.empty()) return;
            msg += std::string(" ") + label + ":";
            for (const auto& id : ids) msg += " " + id;
            msg += ";";
        };
        list("missing", missing);
        list("unexpected", extra);
        msg.pop_back();
        throw InputError(msg);
    }

    std::vector<EvalRecord> records;
    records.reserve(tasks.size());
    for (const auto& t : tasks) {
        const auto& out = by_id.at(t.text_id)->simplified_sentence;
        EvalRecord r;
        r.text_id = t.text_id;
        r.target = t.target;
        r.predicted = ensemble.predict_level(out);
        r.source_level = ensemble.predict_level(t.original);
        const auto out_vec = embedder.embed(out);
        r.sim_orig = cosine_sim(embedder.embed(t.original), out_vec);
        if (t.reference) r.sim_ref = cosine_sim(embedder.embed(*t.reference), out_vec);
        records.push_back(std::move(r));
    }
    return records;
}

EvalSummary summarize(std::span<const EvalRecord> records) {
    EvalSummary s;
    s.n = records.size();
    s.matrix = confusion_matrix(records);
    if (records.empty()) return s;
    s.rmse = rmse(records);
    double sim_orig = 0.0, sim_ref = 0.0;
    std::size_t n_ref = 0;
    for (const auto& r : records) {
        sim_orig += r.sim_orig;
        if (r.sim_ref) {
            sim_ref += *r.sim_ref;
            ++n_ref;
        }
    }
    s.mean_sim_orig = sim_orig / static_cast<double>(records.size());
    if (n_ref > 0) s.mean_sim_ref = sim_ref / static_cast<double>(n_ref);
    return s;
}

void write_summary_tsv(std::ostream& out, const EvalSummary& summary) {
    out << "n\trmse\tsim-orig (proxy)\tsim-ref (proxy)\n";
    out << summary.n << '\t' << fixed(summary.rmse) << '\t' << fixed(summary.mean_sim_orig) << '\t'
        << (summary.mean_sim_ref ? fixed(*summary.mean_sim_ref) : "-") << '\n';
}

void write_confusion_tsv(std::ostream& out, const ConfusionMatrix& matrix) {
    out << "target\\predicted";
    for (auto level : kAllLevels) out << '\t' << to_label(level);
    out << '\n';
    for (auto target : kAllLevels) {
        out << to_label(target);
        for (auto pred : kAllLevels) {
            out << '\t' << matrix[static_cast<std::size_t>(ordinal(target))]
                                 [static_cast<std::size_t>(ordinal(pred))];
        }
        out << '\n';
    }
}

void write_gap_tsv(std::ostream& out, std::span<const GapRow> rows) {
    out << "gap\tn\trmse\tsim-orig (proxy)\tsim-ref (proxy)\n";
    for (const auto& r : rows) {
        out << r.gap << '\t' << r.n << '\t' << fixed(r.rmse) << '\t' << fixed(r.mean_sim_orig) << '\t'
            << (r.mean_sim_ref ? fixed(*r.mean_sim_ref) : "-") << '\n';
    }
}

void write_curve_tsv(std::ostream& out, std::span<const std::pair<int, std::size_t>> curve) {
    out << "retry\thits\n";
    for (const auto& [retry, hits] : curve) out << retry << '\t' << hits << '\n';
}

nlohmann::json summary_to_json(const EvalSummary& summary) {
    nlohmann::json matrix = nlohmann::json::object();
    for (auto target : kAllLevels) {
        nlohmann::json row = nlohmann::json::object();
        for (auto pred : kAllLevels) {
            row[std::string(to_label(pred))] =
                summary.matrix[static_cast<std::size_t>(ordinal(target))]
                              [static_cast<std::size_t>(ordinal(pred))];
        }
        matrix[std::string(to_label(target))] = std::move(row);
    }
    nlohmann::json j = {
        {"n", summary.n},
        {"rmse", summary.rmse},
        {"sim_orig_proxy", summary.mean_sim_orig},
        {"sim_ref_proxy", nullptr},
        {"confusion", std::move(matrix)},
    };
    if (summary.mean_sim_ref) j["sim_ref_proxy"] = *summary.mean_sim_ref;
    return j;
}

nlohmann::json gap_rows_to_json(std::span<const GapRow> rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row = {{"gap", r.gap},
                              {"n", r.n},
                              {"rmse", r.rmse},
                              {"sim_orig_proxy", r.mean_sim_orig},
                              {"sim_ref_proxy", nullptr}};
        if (r.mean_sim_ref) row["sim_ref_proxy"] = *r.mean_sim_ref;
        arr.push_back(std::move(row));
    }
    return arr;
}

}  // namespace cefrsimp
