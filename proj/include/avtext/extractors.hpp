#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "avtext/corpus.hpp"
#include "avtext/errors.hpp"
#include "avtext/llm_client.hpp"
#include "avtext/parsers.hpp"
#include "avtext/prompt.hpp"
#include "avtext/runway.hpp"

// LLM-backed extraction pipelines. Every pipeline is render -> complete ->
// pure parse, so the parsers are testable without any backend and the whole
// path runs against the scripted mock.

namespace avtext {

struct ExtractionOutcome {
    std::string message_id;
    Field field = Field::ARRIVAL_RUNWAYS;
    FieldValue value;
    std::string raw_model_text;
    std::string template_id;
};

// Finds a labeled answer line ("Arrival Runways: ...") case-insensitively
// and returns everything after the label. Throws MissingAnswerLineError.
inline std::string labeled_answer_line(std::string_view text, std::string_view label) {
    for (const std::string& raw : split_lines(text)) {
        std::string_view line = trim(raw);
        if (!istarts_with(line, label)) continue;
        std::string_view rest = line.substr(label.size());
        if (!rest.empty() && rest.front() == ':') rest.remove_prefix(1);
        return std::string(trim(rest));
    }
    throw MissingAnswerLineError(std::string(label));
}

// Arrival/departure runway extraction against the two-labeled-line answer
// contract the datis_arr_dep_runways template pins down.
inline std::pair<RunwaySet, RunwaySet> extract_datis_llm(
    LlmClient& client, const TemplateRegistry& registry, std::string_view text,
    const std::string& template_id = "datis_arr_dep_runways",
    const GenerationParams& params = {}) {
    RenderedPrompt prompt = render(registry.get(template_id), text);
    Completion completion = client.complete(params, prompt);
    RunwaySet arrival =
        parse_runway_list(labeled_answer_line(completion.text, "Arrival Runways"));
    RunwaySet departure =
        parse_runway_list(labeled_answer_line(completion.text, "Departure Runways"));
    return {std::move(arrival), std::move(departure)};
}

inline std::vector<TimelineEntry> build_timeline(LlmClient& client,
                                                 const TemplateRegistry& registry,
                                                 std::string_view ntml_text,
                                                 const GenerationParams& params = {}) {
    RenderedPrompt prompt = render(registry.get("ntml_timeline"), ntml_text);
    Completion completion = client.complete(params, prompt);
    return parse_timeline_output(completion.text);
}

inline TmiReport extract_staffing_tmi(LlmClient& client, const TemplateRegistry& registry,
                                      std::string_view ntml_text,
                                      const GenerationParams& params = {}) {
    RenderedPrompt prompt = render(registry.get("ntml_staffing_tmi"), ntml_text);
    Completion completion = client.complete(params, prompt);
    return parse_tmi_output(completion.text);
}

// Text transform only; no aeronautical validation.
inline std::string clean_transcript(LlmClient& client, const TemplateRegistry& registry,
                                    std::string_view transcript,
                                    const GenerationParams& params = {}) {
    RenderedPrompt prompt = render(registry.get("transcript_clean"), transcript);
    Completion completion = client.complete(params, prompt);
    return detail::strip_quotes(completion.text);
}

inline std::string decode_metar_llm(LlmClient& client, const TemplateRegistry& registry,
                                    std::string_view code,
                                    const GenerationParams& params = {}) {
    RenderedPrompt prompt = render(registry.get("metar_decode"), code);
    Completion completion = client.complete(params, prompt);
    return std::string(trim(completion.text));
}

// ---- outcome serialization ----
// One JSONL record per (message_id, field), with the value string-encoded
// exactly as gold files encode it, so eval consumes both uniformly:
//   {"message_id", "field", "value", "template_id", "raw_model_text"}

inline nlohmann::json outcome_to_json(const ExtractionOutcome& outcome) {
    nlohmann::json j;
    j["message_id"] = outcome.message_id;
    j["field"] = to_string(outcome.field);
    j["value"] = serialize_field_value(outcome.value);
    j["template_id"] = outcome.template_id;
    j["raw_model_text"] = outcome.raw_model_text;
    return j;
}

inline void write_outcomes(const std::vector<ExtractionOutcome>& outcomes,
                           std::ostream& out) {
    for (const auto& o : outcomes) out << outcome_to_json(o).dump() << '\n';
}

inline void write_outcomes(const std::vector<ExtractionOutcome>& outcomes,
                           const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    write_outcomes(outcomes, out);
    out.flush();
    if (!out) throw IoError("short write to " + path.string());
}

inline std::vector<ExtractionOutcome> load_outcomes(const std::filesystem::path& path) {
    std::ifstream in = detail::open_or_throw(path);
    std::vector<ExtractionOutcome> outcomes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw MalformedRecordError(line_no, "invalid JSON");
        ExtractionOutcome o;
        std::string value;
        try {
            o.message_id = j.at("message_id").get<std::string>();
            o.field = parse_field(j.at("field").get<std::string>());
            value = j.at("value").get<std::string>();
            o.template_id = j.value("template_id", std::string{});
            o.raw_model_text = j.value("raw_model_text", std::string{});
        } catch (const nlohmann::json::exception& e) {
            throw MalformedRecordError(line_no, e.what());
        }
        try {
            o.value = parse_field_value(o.field, value);
        } catch (const Error& e) {
            throw MalformedRecordError(line_no, e.what());
        }
        outcomes.push_back(std::move(o));
    }
    return outcomes;
}

}  // namespace avtext
