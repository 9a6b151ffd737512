#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "avtext/corpus.hpp"
#include "avtext/datis_rules.hpp"
#include "avtext/parsers.hpp"
#include "avtext/runway.hpp"

// Grammar-based synthetic corpora with generator-owned ground truth. Real
// operational corpora are not redistributable, so desk-scale verification
// runs against these: every message is assembled from the documented cue
// grammar and labeled by construction. Same spec -> byte-identical corpus
// (mt19937_64's output sequence is pinned by the standard; no std
// distributions are used).

namespace avtext {

struct SynthSpec {
    int n = 100;
    std::uint64_t seed = 0;
    double noise_level = 0.0;  // per-message probability of one perturbation
};

namespace detail {

class SynthRng {
public:
    explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

    bool chance(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return u < p;
    }

    template <typename T>
    const T& choose(const std::vector<T>& options) {
        return options[pick(options.size())];
    }

private:
    std::mt19937_64 engine_;
};

inline std::vector<RunwayDesignator> all_designators() {
    std::vector<RunwayDesignator> out;
    for (int n = 1; n <= 36; ++n) {
        out.push_back({n, std::nullopt});
        out.push_back({n, RunwaySide::L});
        out.push_back({n, RunwaySide::C});
        out.push_back({n, RunwaySide::R});
    }
    return out;
}

inline std::string hhmm(std::size_t minutes_of_day) {
    std::size_t hh = (minutes_of_day / 60) % 24, mm = minutes_of_day % 60;
    std::string out = "0000";
    out[0] = static_cast<char>('0' + hh / 10);
    out[1] = static_cast<char>('0' + hh % 10);
    out[2] = static_cast<char>('0' + mm / 10);
    out[3] = static_cast<char>('0' + mm % 10);
    return out;
}

}  // namespace detail

enum class SynthPerturbation { None, ZeroPad, RySwap, LowercaseClause };

inline std::string to_string(SynthPerturbation p) {
    switch (p) {
        case SynthPerturbation::None: return "none";
        case SynthPerturbation::ZeroPad: return "zero_pad";
        case SynthPerturbation::RySwap: return "ry_swap";
        case SynthPerturbation::LowercaseClause: return "lowercase";
    }
    return "?";
}

// Builds n DATIS messages from arrival/departure/closed/condition-code
// clauses with runways sampled uniformly from the 144 designators. With
// probability noise_level a message gets exactly one perturbation from
// {zero-padding, RY/RWY spelling swap, lowercased clause}; all three are
// normalization-recoverable, so labels never change. The perturbation is
// recorded in metadata["perturbation"] for audits.
inline std::pair<std::vector<RawMessage>, std::vector<GoldLabel>> generate_synth_datis(
    const SynthSpec& spec) {
    detail::SynthRng rng(spec.seed);
    const std::vector<RunwayDesignator> designators = detail::all_designators();

    static const std::vector<std::string> kFillers = {
        "1/8 INCH SLUSH ALL SURFACES",
        "BIRDS VICINITY ARPT",
        "LOW LEVEL WIND SHEAR ADVISORIES IN EFFECT",
        "NOTAMS AVBL ON REQUEST",
        "HAZD WX INFO AVBL ON FSS FREQS",
        "CRANE 1 NM EAST OF ARPT 200 FT AGL",
    };
    static const std::vector<std::string> kTaxiways = {"A", "B", "C", "D", "E3", "F",
                                                       "G1", "H", "K", "M2"};

    std::vector<RawMessage> messages;
    std::vector<GoldLabel> labels;

    for (int idx = 0; idx < spec.n; ++idx) {
        auto sample_runways = [&](std::size_t count, RunwaySet* avoid) {
            std::vector<RunwayDesignator> out;
            RunwaySet used;
            while (out.size() < count) {
                RunwayDesignator r = designators[rng.pick(designators.size())];
                if (avoid && avoid->count(r)) continue;
                if (!used.insert(r).second) continue;
                out.push_back(r);
            }
            return out;
        };

        std::size_t layout = rng.pick(4);  // 0 arr only, 1 dep only, else both
        bool want_arrival = layout != 1;
        bool want_departure = layout != 0;

        std::vector<RunwayDesignator> arrival =
            want_arrival ? sample_runways(1 + rng.pick(3), nullptr)
                         : std::vector<RunwayDesignator>{};
        std::vector<RunwayDesignator> departure =
            want_departure ? sample_runways(1 + rng.pick(3), nullptr)
                           : std::vector<RunwayDesignator>{};

        RunwaySet arrival_set(arrival.begin(), arrival.end());
        RunwaySet departure_set(departure.begin(), departure.end());
        RunwaySet active = arrival_set;
        active.insert(departure_set.begin(), departure_set.end());

        bool closed_runway_clause = rng.chance(0.2);
        bool closed_taxiway_clause = rng.chance(0.2);
        std::vector<RunwayDesignator> closed =
            closed_runway_clause ? sample_runways(1, &active)
                                 : std::vector<RunwayDesignator>{};
        std::vector<std::string> closed_taxiways;
        if (closed_taxiway_clause) closed_taxiways.push_back(rng.choose(kTaxiways));

        bool condition_clause = rng.chance(0.4);
        std::vector<RunwayDesignator> condition_runways;
        if (condition_clause) {
            std::size_t count = 1 + rng.pick(3);
            for (std::size_t i = 0; i < count; ++i) {
                if (!active.empty() && rng.chance(0.5)) {
                    std::size_t at = rng.pick(active.size());
                    condition_runways.push_back(*std::next(active.begin(),
                                                           static_cast<std::ptrdiff_t>(at)));
                } else {
                    condition_runways.push_back(sample_runways(1, &active)[0]);
                }
            }
        }
        bool filler_clause = rng.chance(0.5);
        std::string filler = filler_clause ? rng.choose(kFillers) : std::string{};

        // decide noise before rendering so the renderer can apply it
        bool zero_pad_possible = false;
        auto check_small = [&](const std::vector<RunwayDesignator>& rs) {
            for (const auto& r : rs) zero_pad_possible = zero_pad_possible || r.number <= 9;
        };
        check_small(arrival);
        check_small(departure);
        check_small(closed);
        check_small(condition_runways);

        std::size_t arr_pattern = want_arrival ? rng.pick(4) : 0;
        std::size_t dep_pattern = want_departure ? rng.pick(3) : 0;
        if (arr_pattern == 2 && arrival.size() != 1) arr_pattern = 0;  // LOC form is 1-runway
        if (dep_pattern == 1 && departure.size() != 1) dep_pattern = 0;

        // ry_swap needs a prefixed mention somewhere; the only all-bare
        // message shape is a VISUAL APCH arrival alone
        bool has_prefixed = (want_arrival && arr_pattern != 0) || want_departure ||
                            closed_runway_clause || condition_clause;

        SynthPerturbation perturbation = SynthPerturbation::None;
        if (rng.chance(spec.noise_level)) {
            std::vector<SynthPerturbation> applicable = {SynthPerturbation::LowercaseClause};
            if (zero_pad_possible) applicable.push_back(SynthPerturbation::ZeroPad);
            if (has_prefixed) applicable.push_back(SynthPerturbation::RySwap);
            perturbation = applicable[rng.pick(applicable.size())];
        }

        std::string prefix = rng.chance(0.5) ? "RWY" : "RY";
        if (perturbation == SynthPerturbation::RySwap)
            prefix = prefix == "RWY" ? "RY" : "RWY";

        bool zero_pad_pending = perturbation == SynthPerturbation::ZeroPad;
        auto runway_text = [&](const RunwayDesignator& r) {
            std::string s = r.str();
            if (zero_pad_pending && r.number <= 9) {
                s.insert(0, 1, '0');
                zero_pad_pending = false;
            }
            return s;
        };
        auto bare_list = [&](const std::vector<RunwayDesignator>& rs) {
            std::vector<std::string> parts;
            for (const auto& r : rs) parts.push_back(runway_text(r));
            return join(parts, ", ");
        };
        auto prefixed_list = [&](const std::vector<RunwayDesignator>& rs) {
            std::vector<std::string> parts;
            for (const auto& r : rs) parts.push_back(prefix + " " + runway_text(r));
            return join(parts, ", ");
        };

        std::vector<std::string> clauses;
        if (want_arrival) {
            switch (arr_pattern) {
                case 0: clauses.push_back("VISUAL APCH " + bare_list(arrival) + " IN USE"); break;
                case 1: {
                    static const std::vector<std::string> kApproach = {"ILS", "RNAV Y",
                                                                       "ILS OR RNAV Y"};
                    clauses.push_back("ARRIVALS EXPECT " + rng.choose(kApproach) + " " +
                                      prefixed_list(arrival));
                    break;
                }
                case 2:
                    clauses.push_back("LOC " + prefix + " " + runway_text(arrival[0]) +
                                      " APCH IN USE LAND " + prefix + " " +
                                      runway_text(arrival[0]));
                    break;
                default: clauses.push_back("LANDING " + prefixed_list(arrival));
            }
        }
        if (want_departure) {
            switch (dep_pattern) {
                case 0: clauses.push_back("DEPG " + prefixed_list(departure)); break;
                case 1:
                    clauses.push_back("DEPART " + prefix + " " + runway_text(departure[0]));
                    break;
                default: clauses.push_back("DEPARTING " + prefixed_list(departure));
            }
        }
        if (!filler.empty()) clauses.push_back(filler);
        for (const auto& r : closed) clauses.push_back(prefix + " " + runway_text(r) + " CLOSED");
        for (const auto& t : closed_taxiways) clauses.push_back("TWY " + t + " CLOSED");
        if (!condition_runways.empty()) {
            std::vector<std::string> segments;
            for (const auto& r : condition_runways) {
                int a = static_cast<int>(rng.pick(7)), b = static_cast<int>(rng.pick(7)),
                    c = static_cast<int>(rng.pick(7));
                std::string at = detail::hhmm(rng.pick(24 * 60));
                segments.push_back(prefix + " " + runway_text(r) + " CONDITION CODES " +
                                   std::to_string(a) + " " + std::to_string(b) + " " +
                                   std::to_string(c) + " AT " + at + "Z");
            }
            clauses.push_back(join(segments, ", "));
        }

        if (perturbation == SynthPerturbation::LowercaseClause && !clauses.empty()) {
            std::size_t at = rng.pick(clauses.size());
            clauses[at] = to_lower(clauses[at]);
        }

        RawMessage msg;
        msg.id = "synth-" + std::to_string(100000 + idx).substr(1);
        msg.source = Source::DATIS;
        msg.text = join(clauses, ".\n") + ".";
        msg.metadata["perturbation"] = to_string(perturbation);
        messages.push_back(std::move(msg));

        const std::string& id = messages.back().id;
        RunwaySet closed_set(closed.begin(), closed.end());
        TaxiwayList taxiway_label(closed_taxiways.begin(), closed_taxiways.end());
        std::sort(taxiway_label.begin(), taxiway_label.end());
        labels.push_back({id, Field::ARRIVAL_RUNWAYS, arrival_set});
        labels.push_back({id, Field::DEPARTURE_RUNWAYS, departure_set});
        labels.push_back({id, Field::CLOSED_RUNWAYS, closed_set});
        labels.push_back({id, Field::CLOSED_TAXIWAYS, taxiway_label});
    }
    return {std::move(messages), std::move(labels)};
}

// NTML-style log messages with generator-known timelines, for mock-echo
// oracle loops: "APT GDP CRITIQUE- 1256: EVENT...CK 1347: EVENT...CK".
inline std::pair<std::vector<RawMessage>, std::vector<GoldLabel>>
generate_synth_ntml_timeline(const SynthSpec& spec) {
    detail::SynthRng rng(spec.seed);
    static const std::vector<std::string> kAirports = {"PBI", "ASE", "EGE",
                                                       "DCA", "LGA", "SFO"};
    static const std::vector<std::string> kEvents = {
        "HOLDING ADVISORY ISSUED",
        "GDP PROPOSAL SENT",
        "EAST SPECIALIST CONFERENCED WITH THE FACILITIES",
        "WEST SPECIALIST SPOKE WITH ZDV TO DISCUSS THE PLAN",
        "UAL REQUESTED A GDP",
        "TWO AFPS PUBLISHED",
        "RATE DROPPED TO 24",
        "GROUND STOP CANCELLED",
        "PLANNING WEBINAR HELD",
    };

    std::vector<RawMessage> messages;
    std::vector<GoldLabel> labels;
    for (int idx = 0; idx < spec.n; ++idx) {
        std::size_t count = 2 + rng.pick(5);
        std::size_t minutes = 300 + rng.pick(600);
        std::vector<TimelineEntry> timeline;
        std::string body;
        for (std::size_t i = 0; i < count; ++i) {
            std::string time = detail::hhmm(minutes);
            std::string event = rng.choose(kEvents);
            timeline.push_back({time, event});
            body += (i ? " " : "") + time + ": " + event + "...CK";
            minutes += 5 + rng.pick(100);
            if (minutes >= 24 * 60) minutes -= 12 * 60;  // keep HHMM valid
        }
        RawMessage msg;
        msg.id = "synth-ntml-" + std::to_string(100000 + idx).substr(1);
        msg.source = Source::NTML;
        msg.text = rng.choose(kAirports) + " GDP CRITIQUE- " + body;
        messages.push_back(std::move(msg));
        labels.push_back({messages.back().id, Field::TIMELINE, timeline});
    }
    return {std::move(messages), std::move(labels)};
}

// Staffing-trigger messages with generator-known TMI lists (and a share of
// benign messages that trigger nothing).
inline std::pair<std::vector<RawMessage>, std::vector<GoldLabel>>
generate_synth_ntml_staffing(const SynthSpec& spec) {
    detail::SynthRng rng(spec.seed);
    static const std::vector<std::string> kFacilities = {"ZLA", "ZNY", "SCT", "ZOB", "ZTL"};
    static const std::vector<std::string> kReasons = {
        "SICK LEAVE LOSSES, COVID RELATED NO OCL CHANGE",
        "TRAINING BACKLOG NO OCL CHANGE",
        "EQUIPMENT OUTAGE REDUCED POSITIONS",
    };
    static const std::vector<std::string> kAirports = {"BUR", "VNY", "SNA", "SAN",
                                                       "PSP", "LAX", "SMO"};
    static const std::vector<std::string> kFixes = {"OROSZ2", "WLKCR4", "CANOG2", "HHERO3",
                                                    "PADRZ2", "PMD",    "LADYJ4", "IVINS"};
    static const std::vector<std::string> kRates = {"10", "15", "20", "25"};
    static const std::vector<std::string> kSpecials = {
        "VFR SERVICES CURTAILED",
        "INTERNAL CFR NEGATIVE PRACTICE APPROACHES",
    };

    std::vector<RawMessage> messages;
    std::vector<GoldLabel> labels;
    for (int idx = 0; idx < spec.n; ++idx) {
        RawMessage msg;
        msg.id = "synth-tmi-" + std::to_string(100000 + idx).substr(1);
        msg.source = Source::NTML;
        TmiReport report;
        if (rng.chance(0.7)) {
            std::string subject = rng.choose(kFacilities) + " AREA " +
                                  std::string(1, static_cast<char>('A' + rng.pick(6))) +
                                  " STAFFING TRIGGER " + rng.choose(kReasons);
            report.triggered = true;
            report.subject = subject;
            std::size_t count = 2 + rng.pick(5);
            for (std::size_t i = 0; i < count; ++i) {
                if (i + 1 == count && rng.chance(0.4)) {
                    report.tmis.push_back(rng.choose(kSpecials));
                } else {
                    report.tmis.push_back(rng.choose(kRates) + " MIT " +
                                          rng.choose(kAirports) + " DEPARTURES VIA " +
                                          rng.choose(kFixes));
                }
            }
            msg.text = subject + " TMIS POSSIBLE: " + join(report.tmis, " ") +
                       " CUSTOMER OUTREACH COMPLETED.";
        } else {
            msg.text = rng.choose(kFacilities) + " MIT PASSBACK COORDINATED WITH " +
                       rng.choose(kFacilities) + ". NO STAFFING ISSUES REPORTED.";
        }
        messages.push_back(std::move(msg));
        labels.push_back({messages.back().id, Field::TMI_REPORT, report});
    }
    return {std::move(messages), std::move(labels)};
}

}  // namespace avtext
