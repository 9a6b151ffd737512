#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "avtext/errors.hpp"
#include "avtext/strings.hpp"

namespace avtext {

enum class RunwaySide { L, C, R };

inline char side_letter(RunwaySide s) {
    switch (s) {
        case RunwaySide::L: return 'L';
        case RunwaySide::C: return 'C';
        case RunwaySide::R: return 'R';
    }
    return '?';
}

// Canonical runway identity: 1..36 plus optional parallel-runway side letter.
// Ordering is by number, then bare < L < C < R, which fixes both the set
// order and the serialized list order ("32L, 32R, 36").
struct RunwayDesignator {
    int number = 0;
    std::optional<RunwaySide> side;

    std::string str() const {
        std::string out = std::to_string(number);
        if (side) out += side_letter(*side);
        return out;
    }

    friend auto operator<=>(const RunwayDesignator& a, const RunwayDesignator& b) {
        if (auto c = a.number <=> b.number; c != 0) return c;
        auto rank = [](const std::optional<RunwaySide>& s) {
            return s ? static_cast<int>(*s) + 1 : 0;
        };
        return rank(a.side) <=> rank(b.side);
    }
    friend bool operator==(const RunwayDesignator& a, const RunwayDesignator& b) = default;
};

using RunwaySet = std::set<RunwayDesignator>;

// Canonicalizes one runway mention: optional RWY/RY/RUNWAY prefix, optional
// zero padding, optional L/C/R side letter. Idempotent on its own output.
// Throws NotARunwayError for anything outside the 144 legal designators.
inline RunwayDesignator normalize_runway_token(std::string_view raw) {
    std::string t = to_upper(trim(raw));
    if (t.empty()) throw NotARunwayError(std::string(raw));

    for (std::string_view prefix : {"RUNWAYS", "RUNWAY", "RWYS", "RWY", "RYS", "RY"}) {
        if (istarts_with(t, prefix)) {
            std::string_view rest = std::string_view(t).substr(prefix.size());
            // must be a real prefix, not the head of some longer word
            if (rest.empty()) throw NotARunwayError(std::string(raw));
            if (is_space(rest.front()) || (rest.front() >= '0' && rest.front() <= '9')) {
                t = std::string(trim(rest));
                break;
            }
        }
    }
    if (t.empty()) throw NotARunwayError(std::string(raw));

    std::size_t ndigits = 0;
    while (ndigits < t.size() && t[ndigits] >= '0' && t[ndigits] <= '9') ++ndigits;
    if (ndigits == 0 || ndigits > 2) throw NotARunwayError(std::string(raw));

    int number = 0;
    for (std::size_t i = 0; i < ndigits; ++i) number = number * 10 + (t[i] - '0');
    if (number < 1 || number > 36) throw NotARunwayError(std::string(raw));

    std::optional<RunwaySide> side;
    if (ndigits < t.size()) {
        if (t.size() != ndigits + 1) throw NotARunwayError(std::string(raw));
        switch (t[ndigits]) {
            case 'L': side = RunwaySide::L; break;
            case 'C': side = RunwaySide::C; break;
            case 'R': side = RunwaySide::R; break;
            default: throw NotARunwayError(std::string(raw));
        }
    }
    return RunwayDesignator{number, side};
}

// True when the bare token (no prefix) is shaped like a designator,
// without throwing. Used by the clause scanner.
inline bool looks_like_runway(std::string_view token) {
    std::string_view t = trim(token);
    if (t.empty() || t.size() > 3) return false;
    std::size_t ndigits = 0;
    while (ndigits < t.size() && t[ndigits] >= '0' && t[ndigits] <= '9') ++ndigits;
    if (ndigits == 0 || ndigits > 2) return false;
    if (ndigits < t.size()) {
        if (t.size() != ndigits + 1) return false;
        char c = t[ndigits];
        if (c != 'L' && c != 'C' && c != 'R') return false;
    }
    int number = 0;
    for (std::size_t i = 0; i < ndigits; ++i) number = number * 10 + (t[i] - '0');
    return number >= 1 && number <= 36;
}

// "32L, 32R, 36" in set order; the empty set serializes as "None" to match
// the gold-file convention.
inline std::string to_string(const RunwaySet& set) {
    if (set.empty()) return "None";
    std::string out;
    for (const auto& r : set) {
        if (!out.empty()) out += ", ";
        out += r.str();
    }
    return out;
}

// Parses a model's (or gold file's) runway answer: comma/whitespace
// separated designators, each canonicalized; the literal "None" (any case)
// and the empty string both mean the empty set.
inline RunwaySet parse_runway_list(std::string_view text) {
    RunwaySet out;
    std::string_view t = trim(text);
    if (t.empty() || iequals(t, "none")) return out;

    std::vector<std::string> tokens = split_any(t, ", \t\r\n");
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::string token = tokens[i];
        std::string up = to_upper(token);
        // a detached prefix word binds to the next token ("RWY 36R")
        if (up == "RWY" || up == "RY" || up == "RUNWAY" || up == "RWYS" || up == "RYS" ||
            up == "RUNWAYS") {
            if (i + 1 >= tokens.size()) throw UnparseableTokenError(token);
            token += " " + tokens[++i];
        }
        try {
            out.insert(normalize_runway_token(token));
        } catch (const NotARunwayError&) {
            throw UnparseableTokenError(token);
        }
    }
    return out;
}

}  // namespace avtext
