#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "avtext/corpus.hpp"
#include "avtext/errors.hpp"
#include "avtext/extractors.hpp"
#include "avtext/strings.hpp"

// Accuracy evaluation: per-message exact match per field, tallied into a
// method x field table. A message with any wrong runway counts as wrong;
// there is no partial credit.

namespace avtext {

struct FieldAccuracy {
    std::string method;
    Field field = Field::ARRIVAL_RUNWAYS;
    std::size_t correct = 0;
    std::size_t total = 0;  // > 0 by construction

    double accuracy() const {
        return static_cast<double>(correct) / static_cast<double>(total);
    }
    // Display rounding: half-up to the nearest integer percent.
    int percent() const {
        return static_cast<int>(std::floor(accuracy() * 100.0 + 0.5));
    }
};

struct EvalReport {
    std::vector<FieldAccuracy> rows;  // sorted by (method, field)
    std::string corpus_id;
    std::string generated_at;               // ISO-8601 UTC; may be empty
    std::vector<std::string> missing_gold;  // predictions with no gold counterpart

    bool empty() const { return rows.empty(); }
};

namespace detail {

inline std::string canonical_subject(const std::optional<std::string>& subject) {
    if (!subject) return {};
    std::string s = strip_quotes(*subject);
    while (!s.empty() && (s.back() == '.' || is_space(s.back()))) s.pop_back();
    return s;
}

}  // namespace detail

// Exact-match scoring per field type: runway fields compare as canonical
// set equality, timelines entry-by-entry after trimming, TMI reports as
// (triggered, quote-stripped subject, tmis), text fields after whitespace
// normalization. Throws TypeMismatchError when a value is not of the
// field's type.
inline bool score_exact(const FieldValue& pred, const FieldValue& gold, Field field) {
    auto require = [&](bool holds) {
        if (!holds)
            throw TypeMismatchError("field " + to_string(field) +
                                    " got a value of the wrong alternative");
    };
    switch (field) {
        case Field::ARRIVAL_RUNWAYS:
        case Field::DEPARTURE_RUNWAYS:
        case Field::CLOSED_RUNWAYS: {
            require(std::holds_alternative<RunwaySet>(pred) &&
                    std::holds_alternative<RunwaySet>(gold));
            return std::get<RunwaySet>(pred) == std::get<RunwaySet>(gold);
        }
        case Field::CLOSED_TAXIWAYS: {
            require(std::holds_alternative<TaxiwayList>(pred) &&
                    std::holds_alternative<TaxiwayList>(gold));
            return std::get<TaxiwayList>(pred) == std::get<TaxiwayList>(gold);
        }
        case Field::TIMELINE: {
            require(std::holds_alternative<std::vector<TimelineEntry>>(pred) &&
                    std::holds_alternative<std::vector<TimelineEntry>>(gold));
            const auto& p = std::get<std::vector<TimelineEntry>>(pred);
            const auto& g = std::get<std::vector<TimelineEntry>>(gold);
            if (p.size() != g.size()) return false;
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (p[i].time != g[i].time) return false;
                if (trim(p[i].event) != trim(g[i].event)) return false;
            }
            return true;
        }
        case Field::TMI_REPORT: {
            require(std::holds_alternative<TmiReport>(pred) &&
                    std::holds_alternative<TmiReport>(gold));
            const auto& p = std::get<TmiReport>(pred);
            const auto& g = std::get<TmiReport>(gold);
            if (p.triggered != g.triggered) return false;
            if (detail::canonical_subject(p.subject) != detail::canonical_subject(g.subject))
                return false;
            if (p.tmis.size() != g.tmis.size()) return false;
            for (std::size_t i = 0; i < p.tmis.size(); ++i)
                if (trim(p.tmis[i]) != trim(g.tmis[i])) return false;
            return true;
        }
        case Field::CLEANED_TEXT:
        case Field::METAR_MEANING: {
            require(std::holds_alternative<std::string>(pred) &&
                    std::holds_alternative<std::string>(gold));
            return normalize_ws(std::get<std::string>(pred)) ==
                   normalize_ws(std::get<std::string>(gold));
        }
    }
    throw Error("unhandled field");
}

// Tallies per-field accuracy for one method. Gold entries with no matching
// prediction count as incorrect; predictions with no gold counterpart are
// skipped and reported in missing_gold.
inline EvalReport evaluate(const std::vector<ExtractionOutcome>& predictions,
                           const std::vector<GoldLabel>& gold,
                           const std::string& method_name,
                           const std::string& corpus_id = {}) {
    std::map<std::pair<std::string, Field>, const ExtractionOutcome*> by_key;
    for (const auto& p : predictions) by_key[{p.message_id, p.field}] = &p;

    std::map<std::pair<std::string, Field>, const GoldLabel*> gold_keys;
    for (const auto& g : gold) gold_keys[{g.message_id, g.field}] = &g;

    EvalReport report;
    report.corpus_id = corpus_id;
    for (const auto& p : predictions) {
        if (!gold_keys.count({p.message_id, p.field}))
            report.missing_gold.push_back(p.message_id + "/" + to_string(p.field));
    }
    std::sort(report.missing_gold.begin(), report.missing_gold.end());

    std::map<Field, std::pair<std::size_t, std::size_t>> tallies;  // correct, total
    for (const auto& g : gold) {
        auto& [correct, total] = tallies[g.field];
        ++total;
        auto it = by_key.find({g.message_id, g.field});
        if (it != by_key.end() && score_exact(it->second->value, g.value, g.field))
            ++correct;
    }
    for (const auto& [field, tally] : tallies)
        report.rows.push_back(FieldAccuracy{method_name, field, tally.first, tally.second});
    // map iteration is field-ordered and the method is constant, so rows
    // already sort by (method, field)
    return report;
}

// Merges reports from different methods into one table.
inline EvalReport merge_reports(const std::vector<EvalReport>& reports) {
    EvalReport merged;
    for (const auto& r : reports) {
        if (merged.corpus_id.empty()) merged.corpus_id = r.corpus_id;
        merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
        merged.missing_gold.insert(merged.missing_gold.end(), r.missing_gold.begin(),
                                   r.missing_gold.end());
    }
    std::sort(merged.rows.begin(), merged.rows.end(),
              [](const FieldAccuracy& a, const FieldAccuracy& b) {
                  if (a.method != b.method) return a.method < b.method;
                  return a.field < b.field;
              });
    return merged;
}

enum class ReportFormat { TextTable, Json, Csv };

// TEXT_TABLE prints integer percentages (half-up) in the published table
// style; JSON and CSV carry the full-precision accuracy.
inline std::string render_report(const EvalReport& report, ReportFormat format) {
    if (report.empty()) throw EmptyReportError();

    switch (format) {
        case ReportFormat::TextTable: {
            std::size_t method_w = 6, field_w = 5;
            for (const auto& r : report.rows) {
                method_w = std::max(method_w, r.method.size());
                field_w = std::max(field_w, to_string(r.field).size());
            }
            std::ostringstream out;
            out << std::left << std::setw(static_cast<int>(method_w + 2)) << "Method"
                << std::setw(static_cast<int>(field_w + 2)) << "Field" << std::right
                << std::setw(9) << "Correct" << std::setw(7) << "Total" << std::setw(10)
                << "Accuracy" << '\n';
            for (const auto& r : report.rows) {
                out << std::left << std::setw(static_cast<int>(method_w + 2)) << r.method
                    << std::setw(static_cast<int>(field_w + 2)) << to_string(r.field)
                    << std::right << std::setw(9) << r.correct << std::setw(7) << r.total
                    << std::setw(9) << r.percent() << '%' << '\n';
            }
            if (!report.missing_gold.empty())
                out << "# skipped " << report.missing_gold.size()
                    << " prediction(s) without gold labels\n";
            return out.str();
        }
        case ReportFormat::Json: {
            nlohmann::json j;
            j["corpus_id"] = report.corpus_id;
            if (!report.generated_at.empty()) j["generated_at"] = report.generated_at;
            j["rows"] = nlohmann::json::array();
            for (const auto& r : report.rows) {
                nlohmann::json row;
                row["method"] = r.method;
                row["field"] = to_string(r.field);
                row["correct"] = r.correct;
                row["total"] = r.total;
                row["accuracy"] = r.accuracy();
                j["rows"].push_back(std::move(row));
            }
            if (!report.missing_gold.empty()) j["missing_gold"] = report.missing_gold;
            return j.dump(2) + "\n";
        }
        case ReportFormat::Csv: {
            std::ostringstream out;
            out << "method,field,correct,total,accuracy\n";
            for (const auto& r : report.rows) {
                std::string method = r.method;
                bool quote = method.find_first_of(",\"\n") != std::string::npos;
                if (quote) {
                    std::string escaped = "\"";
                    for (char c : method) {
                        if (c == '"') escaped += '"';
                        escaped += c;
                    }
                    escaped += '"';
                    method = escaped;
                }
                out << method << ',' << to_string(r.field) << ',' << r.correct << ','
                    << r.total << ',' << std::setprecision(17) << r.accuracy() << '\n';
            }
            return out.str();
        }
    }
    throw Error("unhandled report format");
}

}  // namespace avtext
