#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "avtext/errors.hpp"
#include "avtext/parsers.hpp"
#include "avtext/runway.hpp"
#include "avtext/strings.hpp"

// Deterministic rule-based DATIS fact extraction. This is a clean
// reimplementation of the documented cue grammar, not a bug-for-bug copy
// of any legacy system: clauses are split on periods/newlines, cue phrases
// decide whether a clause reports arrivals, departures, or closures, and
// CONDITION CODES clauses feed condition reports only.

namespace avtext {

struct ConditionCodeReport {
    RunwayDesignator runway;
    std::array<int, 3> codes{};     // each 0..6, one per runway third
    std::string observed_at;        // "HHMMZ"

    friend bool operator==(const ConditionCodeReport&, const ConditionCodeReport&) = default;
};

struct DatisFacts {
    RunwaySet arrival;
    RunwaySet departure;
    RunwaySet closed_runways;
    std::vector<std::string> closed_taxiways;          // sorted unique
    std::vector<ConditionCodeReport> condition_codes;  // source order

    bool empty() const {
        return arrival.empty() && departure.empty() && closed_runways.empty() &&
               closed_taxiways.empty() && condition_codes.empty();
    }
    friend bool operator==(const DatisFacts&, const DatisFacts&) = default;
};

enum class CueKind { Arrival, Departure, Closed };

struct Cue {
    std::vector<std::string> words;  // upper-case phrase tokens
    CueKind kind;
};

// Cue phrases are data, not code, so users can extend the grammar.
// File format: one `CUE<TAB>{ARRIVAL|DEPARTURE|CLOSED}` per line, `#`
// comments allowed. builtin() carries the same defaults the repo ships
// in data/datis_cues.tsv.
class CueTable {
public:
    void add(std::string_view phrase, CueKind kind) {
        Cue cue;
        cue.words = split_any(to_upper(phrase), " \t");
        cue.kind = kind;
        if (!cue.words.empty()) cues_.push_back(std::move(cue));
    }

    const std::vector<Cue>& cues() const { return cues_; }

    static CueTable builtin() {
        CueTable t;
        for (const char* p : {"APCH IN USE", "APCHS IN USE", "APPROACH IN USE",
                              "APPROACHES IN USE", "ARRIVALS EXPECT", "VISUAL APCH",
                              "LAND", "LANDING", "LNDG", "ILS", "RNAV", "LOC"})
            t.add(p, CueKind::Arrival);
        for (const char* p : {"DEPG", "DEPART", "DEPARTING", "DEPARTURE", "DEPARTURES"})
            t.add(p, CueKind::Departure);
        for (const char* p : {"CLOSED", "CLSD"}) t.add(p, CueKind::Closed);
        return t;
    }

    static CueTable from_file(const std::filesystem::path& path) {
        if (!std::filesystem::exists(path)) throw FileNotFoundError(path.string());
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path.string());
        CueTable t;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string_view s = trim(line);
            if (s.empty() || s.front() == '#') continue;
            std::size_t tab = s.find('\t');
            if (tab == std::string_view::npos)
                throw MalformedRecordError(line_no, "expected CUE<TAB>KIND");
            std::string_view phrase = trim(s.substr(0, tab));
            std::string kind = to_upper(trim(s.substr(tab + 1)));
            if (kind == "ARRIVAL")
                t.add(phrase, CueKind::Arrival);
            else if (kind == "DEPARTURE")
                t.add(phrase, CueKind::Departure);
            else if (kind == "CLOSED")
                t.add(phrase, CueKind::Closed);
            else
                throw MalformedRecordError(line_no, "unknown cue kind: " + kind);
        }
        return t;
    }

private:
    std::vector<Cue> cues_;
};

namespace detail {

struct CueMatch {
    std::size_t pos;   // index of the first matched word
    std::size_t len;   // words consumed
    CueKind kind;
};

inline std::vector<CueMatch> match_cues(const std::vector<std::string>& words,
                                        const CueTable& table) {
    std::vector<CueMatch> matches;
    for (std::size_t i = 0; i < words.size(); ++i) {
        for (const Cue& cue : table.cues()) {
            if (i + cue.words.size() > words.size()) continue;
            bool ok = true;
            for (std::size_t k = 0; k < cue.words.size(); ++k) {
                if (words[i + k] != cue.words[k]) {
                    ok = false;
                    break;
                }
            }
            if (ok) matches.push_back(CueMatch{i, cue.words.size(), cue.kind});
        }
    }
    return matches;
}

inline bool is_runway_prefix(const std::string& w) {
    return w == "RWY" || w == "RY" || w == "RUNWAY" || w == "RWYS" || w == "RYS" ||
           w == "RUNWAYS";
}

// Expands "9L/27R" style pairings; plain tokens come back unchanged.
inline std::vector<std::string> split_slash(const std::string& token) {
    if (token.find('/') == std::string::npos) return {token};
    return split_any(token, "/");
}

struct RunwayMention {
    RunwayDesignator runway;
    std::size_t pos;  // word index of the designator token
};

// Prefixed mentions ("RWY 36R") count anywhere in a clause; bare ones
// ("32L") only when reached by the greedy after-cue scan, which keeps
// stray numbers elsewhere in the clause from being read as runways.
inline std::vector<RunwayMention> collect_prefixed(const std::vector<std::string>& words) {
    std::vector<RunwayMention> out;
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
        if (!is_runway_prefix(words[i])) continue;
        for (const std::string& part : split_slash(words[i + 1])) {
            if (looks_like_runway(part))
                out.push_back({normalize_runway_token(part), i + 1});
        }
    }
    return out;
}

inline bool is_connector(const std::string& w) {
    // skipped during the after-cue scan; single letters cover approach
    // variants like "RNAV Y" (never L/C/R, those are runway sides)
    if (w == "AND" || w == "OR") return true;
    return w.size() == 1 && w[0] >= 'A' && w[0] <= 'Z' && w[0] != 'L' && w[0] != 'C' &&
           w[0] != 'R';
}

inline void scan_after_cue(const std::vector<std::string>& words, std::size_t from,
                           std::vector<RunwayMention>* out) {
    for (std::size_t i = from; i < words.size(); ++i) {
        if (is_runway_prefix(words[i])) continue;  // designator handled next step
        if (is_connector(words[i])) continue;
        bool any = false;
        for (const std::string& part : split_slash(words[i])) {
            if (looks_like_runway(part)) {
                out->push_back({normalize_runway_token(part), i});
                any = true;
            }
        }
        if (!any) return;  // list ends at the first non-runway word
    }
}

inline bool has_word_seq(const std::vector<std::string>& words,
                         std::initializer_list<const char*> seq, std::size_t* pos = nullptr) {
    if (seq.size() == 0 || words.size() < seq.size()) return false;
    for (std::size_t i = 0; i + seq.size() <= words.size(); ++i) {
        bool ok = true;
        std::size_t k = 0;
        for (const char* w : seq) {
            if (words[i + k] != w) {
                ok = false;
                break;
            }
            ++k;
        }
        if (ok) {
            if (pos) *pos = i;
            return true;
        }
    }
    return false;
}

// One report per comma-separated segment:
//   [RWY] <rwy> CONDITION CODES d d d AT HHMMZ
// Segments that fail validation (codes outside 0..6, bad time) are dropped.
inline void parse_condition_segments(std::string_view clause,
                                     std::vector<ConditionCodeReport>* out) {
    for (const std::string& segment : split_any(clause, ",")) {
        std::vector<std::string> words = split_any(to_upper(segment), " \t\r\n");
        std::size_t cond = 0;
        if (!has_word_seq(words, {"CONDITION", "CODES"}, &cond)) continue;

        // runway: the designator token closest before "CONDITION"
        std::vector<std::string> before(words.begin(),
                                        words.begin() + static_cast<std::ptrdiff_t>(cond));
        std::vector<RunwayMention> mentions = collect_prefixed(before);
        if (mentions.empty()) {
            for (std::size_t i = 0; i < before.size(); ++i)
                if (looks_like_runway(before[i]))
                    mentions.push_back({normalize_runway_token(before[i]), i});
        }
        if (mentions.empty()) continue;

        ConditionCodeReport report;
        report.runway = mentions.back().runway;

        std::size_t c = cond + 2;
        if (c + 3 > words.size()) continue;
        bool codes_ok = true;
        for (int k = 0; k < 3; ++k) {
            const std::string& w = words[c + static_cast<std::size_t>(k)];
            if (w.size() != 1 || w[0] < '0' || w[0] > '6') {
                codes_ok = false;
                break;
            }
            report.codes[static_cast<std::size_t>(k)] = w[0] - '0';
        }
        if (!codes_ok) continue;

        std::size_t t = c + 3;
        if (t + 1 >= words.size() || words[t] != "AT") continue;
        const std::string& time = words[t + 1];
        if (time.size() != 5 || time.back() != 'Z' || !valid_hhmm(time.substr(0, 4)))
            continue;
        report.observed_at = time;
        out->push_back(std::move(report));
    }
}

inline bool taxiway_name_shaped(const std::string& w) {
    if (w.empty() || w.size() > 3) return false;
    if (w[0] < 'A' || w[0] > 'Z') return false;
    for (std::size_t i = 1; i < w.size(); ++i) {
        char c = w[i];
        if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))) return false;
    }
    return w != "AND" && w != "ALL";
}

}  // namespace detail

// Extracts structured facts from a DATIS-style message. Unrecognized
// clauses are ignored; an all-empty result is legal. Runways named only in
// CONDITION CODES or CLOSED clauses never reach arrival/departure.
inline DatisFacts extract_datis_rule_based(std::string_view text,
                                           const CueTable& cue_table = CueTable::builtin()) {
    DatisFacts facts;

    for (const std::string& clause : split_any(text, ".\n")) {
        if (trim(clause).empty()) continue;
        std::vector<std::string> words = split_any(to_upper(clause), " \t\r,");
        if (words.empty()) continue;

        if (detail::has_word_seq(words, {"CONDITION", "CODES"})) {
            detail::parse_condition_segments(clause, &facts.condition_codes);
            continue;
        }

        std::vector<detail::CueMatch> matches = detail::match_cues(words, cue_table);
        bool closed = false;
        for (const auto& m : matches) closed = closed || m.kind == CueKind::Closed;

        if (closed) {
            bool taxiway_clause = false;
            for (std::size_t i = 0; i < words.size(); ++i) {
                if (words[i] != "TWY" && words[i] != "TWYS" && words[i] != "TAXIWAY" &&
                    words[i] != "TAXIWAYS")
                    continue;
                taxiway_clause = true;
                for (std::size_t j = i + 1; j < words.size(); ++j) {
                    if (words[j] == "AND") continue;
                    if (!detail::taxiway_name_shaped(words[j])) break;
                    facts.closed_taxiways.push_back(words[j]);
                }
            }
            if (!taxiway_clause) {
                for (const auto& m : detail::collect_prefixed(words))
                    facts.closed_runways.insert(m.runway);
            }
            continue;
        }

        std::vector<detail::CueMatch> activity;
        for (const auto& m : matches)
            if (m.kind != CueKind::Closed) activity.push_back(m);
        if (activity.empty()) continue;

        std::vector<detail::RunwayMention> mentions = detail::collect_prefixed(words);
        for (const auto& m : activity)
            detail::scan_after_cue(words, m.pos + m.len, &mentions);

        // each mention belongs to the nearest cue before it (runway lists
        // follow their cue), falling back to the nearest cue after it
        for (const auto& mention : mentions) {
            const detail::CueMatch* owner = nullptr;
            for (const auto& m : activity) {
                if (m.pos <= mention.pos) {
                    if (!owner || m.pos > owner->pos) owner = &m;
                }
            }
            if (!owner) {
                for (const auto& m : activity)
                    if (!owner || m.pos < owner->pos) owner = &m;
            }
            (owner->kind == CueKind::Departure ? facts.departure : facts.arrival)
                .insert(mention.runway);
        }
    }

    std::sort(facts.closed_taxiways.begin(), facts.closed_taxiways.end());
    facts.closed_taxiways.erase(
        std::unique(facts.closed_taxiways.begin(), facts.closed_taxiways.end()),
        facts.closed_taxiways.end());
    return facts;
}

}  // namespace avtext
