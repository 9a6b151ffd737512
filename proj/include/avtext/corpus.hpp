#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "avtext/errors.hpp"
#include "avtext/parsers.hpp"
#include "avtext/runway.hpp"
#include "avtext/strings.hpp"

// Data model and ingestion for raw messages, gold labels, and the
// (instruction, input, output) export format.
//
// Wire formats (JSONL, one object per line):
//   corpus:  {"id": str, "source": str, "text": str, "metadata": {str: str}}
//   gold:    {"message_id": str, "field": str, "value": str}
//   dataset: {"instruction": str, "input": str, "output": str}

namespace avtext {

enum class Source { DATIS, NTML, TRANSCRIPT, METAR_CODE, DOCUMENT };

inline std::string to_string(Source s) {
    switch (s) {
        case Source::DATIS: return "DATIS";
        case Source::NTML: return "NTML";
        case Source::TRANSCRIPT: return "TRANSCRIPT";
        case Source::METAR_CODE: return "METAR_CODE";
        case Source::DOCUMENT: return "DOCUMENT";
    }
    return "?";
}

inline Source parse_source(std::string_view s) {
    if (s == "DATIS") return Source::DATIS;
    if (s == "NTML") return Source::NTML;
    if (s == "TRANSCRIPT") return Source::TRANSCRIPT;
    if (s == "METAR_CODE") return Source::METAR_CODE;
    if (s == "DOCUMENT") return Source::DOCUMENT;
    throw Error("unknown source: " + std::string(s));
}

enum class Field {
    ARRIVAL_RUNWAYS,
    DEPARTURE_RUNWAYS,
    CLOSED_RUNWAYS,
    CLOSED_TAXIWAYS,
    TIMELINE,
    TMI_REPORT,
    CLEANED_TEXT,
    METAR_MEANING,
};

inline std::string to_string(Field f) {
    switch (f) {
        case Field::ARRIVAL_RUNWAYS: return "ARRIVAL_RUNWAYS";
        case Field::DEPARTURE_RUNWAYS: return "DEPARTURE_RUNWAYS";
        case Field::CLOSED_RUNWAYS: return "CLOSED_RUNWAYS";
        case Field::CLOSED_TAXIWAYS: return "CLOSED_TAXIWAYS";
        case Field::TIMELINE: return "TIMELINE";
        case Field::TMI_REPORT: return "TMI_REPORT";
        case Field::CLEANED_TEXT: return "CLEANED_TEXT";
        case Field::METAR_MEANING: return "METAR_MEANING";
    }
    return "?";
}

inline Field parse_field(std::string_view s) {
    if (s == "ARRIVAL_RUNWAYS") return Field::ARRIVAL_RUNWAYS;
    if (s == "DEPARTURE_RUNWAYS") return Field::DEPARTURE_RUNWAYS;
    if (s == "CLOSED_RUNWAYS") return Field::CLOSED_RUNWAYS;
    if (s == "CLOSED_TAXIWAYS") return Field::CLOSED_TAXIWAYS;
    if (s == "TIMELINE") return Field::TIMELINE;
    if (s == "TMI_REPORT") return Field::TMI_REPORT;
    if (s == "CLEANED_TEXT") return Field::CLEANED_TEXT;
    if (s == "METAR_MEANING") return Field::METAR_MEANING;
    throw UnknownFieldError(std::string(s));
}

struct RawMessage {
    std::string id;
    Source source = Source::DATIS;
    std::string text;
    std::map<std::string, std::string> metadata;

    friend bool operator==(const RawMessage&, const RawMessage&) = default;
};

// Closed-taxiway labels: canonical form is sorted unique upper-case names.
using TaxiwayList = std::vector<std::string>;

// Every gold field parses into one of these alternatives:
//   runway fields -> RunwaySet, CLOSED_TAXIWAYS -> TaxiwayList,
//   TIMELINE -> entries, TMI_REPORT -> TmiReport, text fields -> string.
using FieldValue =
    std::variant<RunwaySet, TaxiwayList, std::vector<TimelineEntry>, TmiReport, std::string>;

struct GoldLabel {
    std::string message_id;
    Field field = Field::ARRIVAL_RUNWAYS;
    FieldValue value;

    friend bool operator==(const GoldLabel&, const GoldLabel&) = default;
};

inline TaxiwayList parse_taxiway_list(std::string_view text) {
    std::string_view t = trim(text);
    if (t.empty() || iequals(t, "none")) return {};
    TaxiwayList out;
    for (const std::string& token : split_any(t, ",")) {
        std::string name = to_upper(trim(token));
        if (!name.empty()) out.push_back(name);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::string to_string(const TaxiwayList& taxiways) {
    if (taxiways.empty()) return "None";
    return join(taxiways, ", ");
}

// Gold labels and predictions share one string encoding per field, so both
// sides of an evaluation go through the same canonicalizer.
inline FieldValue parse_field_value(Field field, std::string_view value) {
    switch (field) {
        case Field::ARRIVAL_RUNWAYS:
        case Field::DEPARTURE_RUNWAYS:
        case Field::CLOSED_RUNWAYS: return parse_runway_list(value);
        case Field::CLOSED_TAXIWAYS: return parse_taxiway_list(value);
        case Field::TIMELINE: return parse_timeline_output(value);
        case Field::TMI_REPORT: return parse_tmi_output(value);
        case Field::CLEANED_TEXT:
        case Field::METAR_MEANING: return std::string(value);
    }
    throw Error("unhandled field");
}

inline std::string serialize_field_value(const FieldValue& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>)
                return v;
            else
                return to_string(v);
        },
        value);
}

// ---- corpus loading ----

enum class CorpusFormat { JSONL, CSV };

namespace detail {

inline std::ifstream open_or_throw(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw FileNotFoundError(path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

inline RawMessage message_from_json(const nlohmann::json& j, std::size_t line_no) {
    if (!j.is_object()) throw MalformedRecordError(line_no, "not a JSON object");
    RawMessage msg;
    try {
        msg.id = j.at("id").get<std::string>();
        msg.source = parse_source(j.at("source").get<std::string>());
        msg.text = j.at("text").get<std::string>();
        if (j.contains("metadata")) {
            for (const auto& [k, v] : j.at("metadata").items())
                msg.metadata[k] = v.get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecordError(line_no, e.what());
    } catch (const Error& e) {
        throw MalformedRecordError(line_no, e.what());
    }
    if (msg.id.empty()) throw MalformedRecordError(line_no, "empty id");
    if (trim(msg.text).empty()) throw MalformedRecordError(line_no, "empty text");
    return msg;
}

// RFC-4180-ish CSV: quoted fields may contain commas, newlines, and ""
// escapes. Returns rows of cells; `line_no` tracks the row's first line.
inline std::vector<std::pair<std::vector<std::string>, std::size_t>> parse_csv(
    std::istream& in) {
    std::vector<std::pair<std::vector<std::string>, std::size_t>> rows;
    std::string cell;
    std::vector<std::string> row;
    bool quoted = false;
    bool row_has_data = false;
    std::size_t line_no = 1, row_start = 1;
    char c;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cell += '"';
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line_no;
                cell += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                row_has_data = true;
                break;
            case ',':
                row.push_back(cell);
                cell.clear();
                row_has_data = true;
                break;
            case '\r': break;
            case '\n':
                ++line_no;
                if (row_has_data || !cell.empty() || !row.empty()) {
                    row.push_back(cell);
                    rows.emplace_back(std::move(row), row_start);
                    row = {};
                    cell.clear();
                    row_has_data = false;
                }
                row_start = line_no;
                break;
            default:
                cell += c;
                row_has_data = true;
        }
    }
    if (quoted) throw MalformedRecordError(row_start, "unterminated quoted field");
    if (row_has_data || !cell.empty() || !row.empty()) {
        row.push_back(cell);
        rows.emplace_back(std::move(row), row_start);
    }
    return rows;
}

}  // namespace detail

// Loads a corpus of raw messages. JSONL is the canonical format; CSV is
// accepted for DATIS-only ingestion (header must name `id` and `text`
// columns, every other column lands in metadata, source is fixed to DATIS).
inline std::vector<RawMessage> load_corpus(const std::filesystem::path& path,
                                           CorpusFormat format = CorpusFormat::JSONL) {
    std::ifstream in = detail::open_or_throw(path);
    std::vector<RawMessage> messages;
    std::set<std::string> seen;

    auto check_id = [&](const RawMessage& msg) {
        if (!seen.insert(msg.id).second) throw DuplicateIdError(msg.id);
    };

    if (format == CorpusFormat::JSONL) {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded()) throw MalformedRecordError(line_no, "invalid JSON");
            RawMessage msg = detail::message_from_json(j, line_no);
            check_id(msg);
            messages.push_back(std::move(msg));
        }
        return messages;
    }

    auto rows = detail::parse_csv(in);
    if (rows.empty()) return messages;
    const auto& header = rows.front().first;
    auto col = [&](std::string_view name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (iequals(trim(header[i]), name)) return i;
        throw MalformedRecordError(1, "CSV header lacks column: " + std::string(name));
    };
    std::size_t id_col = col("id"), text_col = col("text");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& [cells, line_no] = rows[r];
        if (cells.size() != header.size())
            throw MalformedRecordError(line_no, "cell count does not match header");
        RawMessage msg;
        msg.source = Source::DATIS;
        msg.id = std::string(trim(cells[id_col]));
        msg.text = cells[text_col];
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i == id_col || i == text_col) continue;
            msg.metadata[std::string(trim(header[i]))] = cells[i];
        }
        if (msg.id.empty()) throw MalformedRecordError(line_no, "empty id");
        if (trim(msg.text).empty()) throw MalformedRecordError(line_no, "empty text");
        check_id(msg);
        messages.push_back(std::move(msg));
    }
    return messages;
}

// Loads gold labels and parses each value into its field's typed domain.
// Duplicate (message_id, field) pairs are malformed.
inline std::vector<GoldLabel> load_gold(const std::filesystem::path& path) {
    std::ifstream in = detail::open_or_throw(path);
    std::vector<GoldLabel> labels;
    std::set<std::pair<std::string, Field>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw MalformedRecordError(line_no, "invalid JSON");
        GoldLabel label;
        std::string value;
        try {
            label.message_id = j.at("message_id").get<std::string>();
            label.field = parse_field(j.at("field").get<std::string>());
            value = j.at("value").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw MalformedRecordError(line_no, e.what());
        }
        if (label.message_id.empty()) throw MalformedRecordError(line_no, "empty message_id");
        try {
            label.value = parse_field_value(label.field, value);
        } catch (const Error& e) {
            throw MalformedRecordError(line_no, e.what());
        }
        if (!seen.insert({label.message_id, label.field}).second)
            throw MalformedRecordError(line_no, "duplicate (message_id, field): " +
                                                    label.message_id + "/" +
                                                    to_string(label.field));
        labels.push_back(std::move(label));
    }
    return labels;
}

// Cross-checks gold labels against a loaded corpus; returns the ids of
// labels whose message_id matches nothing.
inline std::vector<std::string> dangling_message_ids(const std::vector<GoldLabel>& gold,
                                                     const std::vector<RawMessage>& corpus) {
    std::set<std::string> known;
    for (const auto& m : corpus) known.insert(m.id);
    std::vector<std::string> out;
    for (const auto& g : gold)
        if (!known.count(g.message_id)) out.push_back(g.message_id);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline void require_gold_references(const std::vector<GoldLabel>& gold,
                                    const std::vector<RawMessage>& corpus) {
    auto dangling = dangling_message_ids(gold, corpus);
    if (!dangling.empty()) throw DanglingMessageIdError(join(dangling, ", "));
}

// ---- instruction-tuning dataset ----

struct InstructionRecord {
    std::string instruction;
    std::string input;   // may be empty
    std::string output;

    friend bool operator==(const InstructionRecord&, const InstructionRecord&) = default;
};

// Writes one JSON object per line with exactly the keys "instruction",
// "input", "output". Returns the number written. Re-loading yields
// byte-identical string fields.
inline std::size_t export_instruction_dataset(const std::vector<InstructionRecord>& records,
                                              const std::filesystem::path& path) {
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].instruction.empty()) throw InvalidRecordError(i, "empty instruction");
        if (records[i].output.empty()) throw InvalidRecordError(i, "empty output");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& rec : records) {
        nlohmann::json j;
        j["instruction"] = rec.instruction;
        j["input"] = rec.input;
        j["output"] = rec.output;
        out << j.dump() << '\n';
    }
    out.flush();
    if (!out) throw IoError("short write to " + path.string());
    return records.size();
}

inline std::vector<InstructionRecord> load_instruction_dataset(
    const std::filesystem::path& path) {
    std::ifstream in = detail::open_or_throw(path);
    std::vector<InstructionRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw MalformedRecordError(line_no, "invalid JSON");
        InstructionRecord rec;
        try {
            rec.instruction = j.at("instruction").get<std::string>();
            rec.input = j.at("input").get<std::string>();
            rec.output = j.at("output").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw MalformedRecordError(line_no, e.what());
        }
        if (rec.instruction.empty()) throw MalformedRecordError(line_no, "empty instruction");
        if (rec.output.empty()) throw MalformedRecordError(line_no, "empty output");
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace avtext
