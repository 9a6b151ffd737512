#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "avtext/errors.hpp"
#include "avtext/strings.hpp"

// "### Instruction / ### Input / ### Output" few-shot prompt rendering.
// The whitespace discipline is fixed (one '\n' after each header, one blank
// line between sections, nothing after the final output header) so renders
// are byte-deterministic and golden-testable.

namespace avtext {

struct PromptShot {
    std::string input;
    std::string output;

    friend bool operator==(const PromptShot&, const PromptShot&) = default;
};

struct PromptTemplate {
    std::string id;
    std::string instruction;
    std::vector<PromptShot> shots;  // empty means zero-shot
    std::string description;

    friend bool operator==(const PromptTemplate&, const PromptTemplate&) = default;
};

struct RenderedPrompt {
    std::string text;
    std::string template_id;
    std::string input_digest;  // stable hash of the user input
};

namespace detail {

// Content lines that start with "### " would spoof a section header, so a
// zero-width space goes in front of the hashes.
inline std::string escape_section_spoof(std::string_view body) {
    static constexpr std::string_view kZwsp = "​";
    std::vector<std::string> lines = split_lines(body);
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        if (std::string_view(lines[i]).substr(0, 4) == "### ") out += kZwsp;
        out += lines[i];
    }
    if (!body.empty() && body.back() == '\n') out += '\n';
    return out;
}

}  // namespace detail

inline RenderedPrompt render(const PromptTemplate& tmpl, std::string_view input) {
    if (trim(input).empty()) throw EmptyInputError();

    std::string text = "### Instruction:\n";
    text += detail::escape_section_spoof(tmpl.instruction);
    text += "\n\n";
    for (const PromptShot& shot : tmpl.shots) {
        text += "### Input:\n";
        text += detail::escape_section_spoof(shot.input);
        text += "\n\n### Output:\n";
        text += detail::escape_section_spoof(shot.output);
        text += "\n\n";
    }
    text += "### Input:\n";
    text += detail::escape_section_spoof(input);
    text += "\n\n### Output:\n";

    return RenderedPrompt{std::move(text), tmpl.id, to_hex(fnv1a64(input))};
}

// Immutable-after-load registry. Built-in templates live in
// data/templates/*.json; ids are unique and listings are lexicographic.
class TemplateRegistry {
public:
    void add(PromptTemplate tmpl) {
        if (tmpl.id.empty()) throw Error("template id is empty");
        if (tmpl.instruction.empty())
            throw Error("template instruction is empty: " + tmpl.id);
        if (templates_.count(tmpl.id)) throw DuplicateIdError(tmpl.id);
        templates_.emplace(tmpl.id, std::move(tmpl));
    }

    const PromptTemplate& get(const std::string& id) const {
        auto it = templates_.find(id);
        if (it == templates_.end()) throw UnknownTemplateError(id);
        return it->second;
    }

    bool contains(const std::string& id) const { return templates_.count(id) > 0; }
    std::size_t size() const { return templates_.size(); }

    std::vector<std::pair<std::string, std::string>> list() const {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& [id, tmpl] : templates_) out.emplace_back(id, tmpl.description);
        return out;  // std::map iteration is already id-sorted
    }

    static PromptTemplate load_file(const std::filesystem::path& path) {
        if (!std::filesystem::exists(path)) throw FileNotFoundError(path.string());
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path.string());
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw Error("template file is not a JSON object: " + path.string());
        PromptTemplate tmpl;
        try {
            tmpl.id = j.at("id").get<std::string>();
            tmpl.instruction = j.at("instruction").get<std::string>();
            tmpl.description = j.value("description", std::string{});
            if (j.contains("shots")) {
                for (const auto& s : j.at("shots")) {
                    tmpl.shots.push_back(PromptShot{s.at("input").get<std::string>(),
                                                    s.at("output").get<std::string>()});
                }
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error("bad template file " + path.string() + ": " + e.what());
        }
        return tmpl;
    }

    // Loads every *.json in a directory (sorted by filename for stable
    // error order).
    static TemplateRegistry load_dir(const std::filesystem::path& dir) {
        if (!std::filesystem::is_directory(dir))
            throw FileNotFoundError(dir.string() + " (template directory)");
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        TemplateRegistry reg;
        for (const auto& f : files) reg.add(load_file(f));
        return reg;
    }

private:
    std::map<std::string, PromptTemplate> templates_;
};

inline const PromptTemplate& get_template(const TemplateRegistry& registry,
                                          const std::string& id) {
    return registry.get(id);
}

inline std::vector<std::pair<std::string, std::string>> list_templates(
    const TemplateRegistry& registry) {
    return registry.list();
}

}  // namespace avtext
