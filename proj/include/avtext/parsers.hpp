#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avtext/errors.hpp"
#include "avtext/strings.hpp"

// Pure parsers for structured model answers (timelines, staffing/TMI
// reports). These never touch a backend; the extraction pipelines are
// render -> complete -> one of these.

namespace avtext {

inline bool valid_hhmm(std::string_view s) {
    if (s.size() != 4 || !all_digits(s)) return false;
    int hh = (s[0] - '0') * 10 + (s[1] - '0');
    int mm = (s[2] - '0') * 10 + (s[3] - '0');
    return hh <= 23 && mm <= 59;
}

struct TimelineEntry {
    std::string time;   // "HHMM", Zulu
    std::string event;

    friend bool operator==(const TimelineEntry&, const TimelineEntry&) = default;
};

// Accepts lines shaped "HHMM: event", tolerating an optional leading dash
// (one-shot outputs use dashed bullets, final outputs usually do not).
// Anything else is ignored; the empty list is legal.
inline std::vector<TimelineEntry> parse_timeline_output(std::string_view text) {
    std::vector<TimelineEntry> out;
    for (const std::string& raw_line : split_lines(text)) {
        std::string_view line = trim(raw_line);
        if (line.empty()) continue;
        if (line.front() == '-') line = trim(line.substr(1));
        if (line.size() < 6) continue;
        std::string_view time = line.substr(0, 4);
        if (!valid_hhmm(time) || line[4] != ':') continue;
        std::string_view event = trim(line.substr(5));
        if (event.empty()) continue;
        out.push_back(TimelineEntry{std::string(time), std::string(event)});
    }
    return out;
}

inline std::string to_string(const std::vector<TimelineEntry>& timeline) {
    std::string out;
    for (const auto& e : timeline) {
        if (!out.empty()) out += '\n';
        out += e.time + ": " + e.event;
    }
    return out;
}

struct TmiReport {
    bool triggered = false;
    std::optional<std::string> subject;  // absent when not triggered
    std::vector<std::string> tmis;       // numbering-free, source order

    friend bool operator==(const TmiReport&, const TmiReport&) = default;
};

namespace detail {

// Finds "K. " as a standalone numbered-list marker at or after `from`.
// Returns the marker's start, or npos. `end_out` is one past the marker.
inline std::size_t find_numbered_marker(std::string_view s, std::size_t from, int k,
                                        std::size_t* end_out) {
    std::string needle = std::to_string(k) + ".";
    for (std::size_t i = from; (i = s.find(needle, i)) != std::string_view::npos; ++i) {
        bool start_ok = i == 0 || is_space(s[i - 1]);
        std::size_t after = i + needle.size();
        bool end_ok = after >= s.size() || is_space(s[after]);
        if (start_ok && end_ok) {
            if (end_out) *end_out = after;
            return i;
        }
    }
    return std::string_view::npos;
}

inline std::string strip_quotes(std::string_view s) {
    std::string_view t = trim(s);
    if (t.size() >= 2 && ((t.front() == '\'' && t.back() == '\'') ||
                          (t.front() == '"' && t.back() == '"'))) {
        t = trim(t.substr(1, t.size() - 2));
    }
    return std::string(t);
}

}  // namespace detail

// Staffing-trigger answers: "Yes, ... The triggering subject is '<...>.'
// The TMIS are as follows: 1. ... 2. ...". Anything not starting with
// "Yes" is a negative report. The subject is the first quoted span after
// "triggering subject is" (falling back to the text up to the next period);
// its surrounding quotes and trailing period are stripped.
inline TmiReport parse_tmi_output(std::string_view text) {
    std::string_view s = trim(text);
    if (!istarts_with(s, "yes")) return TmiReport{};

    TmiReport report;
    report.triggered = true;

    std::size_t scan_from = 0;
    static constexpr std::string_view kSubjectCue = "triggering subject is";
    if (std::size_t cue = ifind(s, kSubjectCue); cue != std::string_view::npos) {
        std::size_t after = cue + kSubjectCue.size();
        std::size_t open = s.find('\'', after);
        std::size_t close = open == std::string_view::npos
                                ? std::string_view::npos
                                : s.find('\'', open + 1);
        std::string subject;
        if (open != std::string_view::npos && close != std::string_view::npos) {
            subject = std::string(trim(s.substr(open + 1, close - open - 1)));
            scan_from = close + 1;
        } else {
            std::size_t period = s.find('.', after);
            std::size_t end = period == std::string_view::npos ? s.size() : period;
            subject = detail::strip_quotes(s.substr(after, end - after));
            scan_from = end;
        }
        while (!subject.empty() && (subject.back() == '.' || is_space(subject.back())))
            subject.pop_back();
        if (!subject.empty()) report.subject = subject;
    }

    std::size_t marker_end = 0;
    std::size_t pos = detail::find_numbered_marker(s, scan_from, 1, &marker_end);
    int k = 1;
    while (pos != std::string_view::npos) {
        std::size_t next_end = 0;
        std::size_t next = detail::find_numbered_marker(s, marker_end, k + 1, &next_end);
        std::string_view item = next == std::string_view::npos
                                    ? s.substr(marker_end)
                                    : s.substr(marker_end, next - marker_end);
        report.tmis.emplace_back(trim(item));
        pos = next;
        marker_end = next_end;
        ++k;
    }

    if (report.tmis.empty())
        throw InconsistentAnswerError("answer says Yes but lists no numbered TMIs");
    return report;
}

inline std::string to_string(const TmiReport& report) {
    if (!report.triggered)
        return "No, staffing has not triggered traffic management initiatives (TMIS).";
    std::string out = "Yes, staffing has triggered traffic management initiatives (TMIS).";
    if (report.subject)
        out += " The triggering subject is '" + *report.subject + ".'";
    out += " The TMIS are as follows:";
    for (std::size_t i = 0; i < report.tmis.size(); ++i)
        out += " " + std::to_string(i + 1) + ". " + report.tmis[i];
    return out;
}

}  // namespace avtext
