#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>

#include "avtext/errors.hpp"
#include "avtext/strings.hpp"

namespace avtext {

// METAR contraction glossary: CODE -> title-case expansion. Lookup is
// case-insensitive on the code; expansions come back exactly as stored.
// File format: one `CODE<TAB>Expansion` per line, `#` starts a comment.
// Loaded once and shared read-only.
class MetarGlossary {
public:
    static MetarGlossary from_file(const std::filesystem::path& path) {
        if (!std::filesystem::exists(path)) throw FileNotFoundError(path.string());
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path.string());
        MetarGlossary g;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string_view t = trim(line);
            if (t.empty() || t.front() == '#') continue;
            std::size_t tab = t.find('\t');
            if (tab == std::string_view::npos)
                throw MalformedRecordError(line_no, "expected CODE<TAB>Expansion");
            std::string_view code = trim(t.substr(0, tab));
            std::string_view expansion = trim(t.substr(tab + 1));
            if (code.empty() || expansion.empty())
                throw MalformedRecordError(line_no, "empty code or expansion");
            g.add(code, expansion);
        }
        return g;
    }

    void add(std::string_view code, std::string_view expansion) {
        entries_[to_upper(code)] = std::string(expansion);
    }

    std::string decode(std::string_view code) const {
        auto it = entries_.find(to_upper(trim(code)));
        if (it == entries_.end()) throw NotInGlossaryError(std::string(trim(code)));
        return it->second;
    }

    bool contains(std::string_view code) const {
        return entries_.count(to_upper(trim(code))) > 0;
    }

    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

inline std::string decode_metar_term(const MetarGlossary& glossary, std::string_view code) {
    return glossary.decode(code);
}

}  // namespace avtext
