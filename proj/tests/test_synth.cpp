#include "avtext/synth.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "avtext/eval.hpp"
#include "avtext/extractors.hpp"
#include "support.hpp"

using namespace avtext;

namespace {

std::string corpus_digest(const std::vector<RawMessage>& messages,
                          const std::vector<GoldLabel>& labels) {
    std::string all;
    for (const auto& m : messages) {
        all += m.id + "\x1f" + m.text + "\x1f";
        for (const auto& [k, v] : m.metadata) all += k + "=" + v + ";";
    }
    for (const auto& g : labels)
        all += g.message_id + "|" + to_string(g.field) + "|" + serialize_field_value(g.value);
    return to_hex(fnv1a64(all));
}

std::vector<ExtractionOutcome> rule_based_predictions(
    const std::vector<RawMessage>& messages) {
    std::vector<ExtractionOutcome> out;
    for (const auto& m : messages) {
        DatisFacts facts = extract_datis_rule_based(m.text);
        out.push_back({m.id, Field::ARRIVAL_RUNWAYS, facts.arrival, "", "rules"});
        out.push_back({m.id, Field::DEPARTURE_RUNWAYS, facts.departure, "", "rules"});
        out.push_back({m.id, Field::CLOSED_RUNWAYS, facts.closed_runways, "", "rules"});
        out.push_back({m.id, Field::CLOSED_TAXIWAYS,
                       TaxiwayList(facts.closed_taxiways.begin(), facts.closed_taxiways.end()),
                       "", "rules"});
    }
    return out;
}

}  // namespace

TEST_CASE("same spec yields byte-identical corpora") {
    auto [m1, g1] = generate_synth_datis({200, 1, 0.0});
    auto [m2, g2] = generate_synth_datis({200, 1, 0.0});
    CHECK(corpus_digest(m1, g1) == corpus_digest(m2, g2));

    auto [m3, g3] = generate_synth_datis({200, 2, 0.0});
    CHECK(corpus_digest(m1, g1) != corpus_digest(m3, g3));

    auto [n1, t1] = generate_synth_ntml_timeline({50, 9, 0.0});
    auto [n2, t2] = generate_synth_ntml_timeline({50, 9, 0.0});
    CHECK(corpus_digest(n1, t1) == corpus_digest(n2, t2));
}

TEST_CASE("single noise-free message extracts to its own label") {
    auto [messages, gold] = generate_synth_datis({1, 7, 0.0});
    REQUIRE(messages.size() == 1);
    REQUIRE(gold.size() == 4);
    DatisFacts facts = extract_datis_rule_based(messages[0].text);
    for (const auto& g : gold) {
        if (g.field == Field::ARRIVAL_RUNWAYS)
            CHECK(std::get<RunwaySet>(g.value) == facts.arrival);
        if (g.field == Field::DEPARTURE_RUNWAYS)
            CHECK(std::get<RunwaySet>(g.value) == facts.departure);
    }
}

TEST_CASE("rule-based baseline is oracle-exact on noise-free corpora") {
    auto [messages, gold] = generate_synth_datis({200, 1, 0.0});
    EvalReport report = evaluate(rule_based_predictions(messages), gold, "rules");
    REQUIRE(report.rows.size() == 4);
    for (const auto& row : report.rows) {
        INFO(to_string(row.field));
        CHECK(row.accuracy() == 1.0);
    }
}

TEST_CASE("perturbations are normalization-recoverable at noise 0.5") {
    auto [messages, gold] = generate_synth_datis({200, 3, 0.5});
    EvalReport report = evaluate(rule_based_predictions(messages), gold, "rules");
    for (const auto& row : report.rows) {
        INFO(to_string(row.field));
        CHECK(row.accuracy() >= 0.95);
    }
}

TEST_CASE("noise 1.0 perturbs every message exactly once, labels unchanged") {
    auto [noisy, noisy_gold] = generate_synth_datis({100, 5, 1.0});
    std::size_t perturbed = 0;
    for (const auto& m : noisy) {
        REQUIRE(m.metadata.count("perturbation"));
        if (m.metadata.at("perturbation") != "none") ++perturbed;
    }
    CHECK(perturbed == noisy.size());

    // noise never touches labels: lowercased text still extracts to gold
    EvalReport report = evaluate(rule_based_predictions(noisy), noisy_gold, "rules");
    for (const auto& row : report.rows) CHECK(row.accuracy() == 1.0);

    auto [clean, clean_gold] = generate_synth_datis({100, 5, 0.0});
    for (const auto& m : clean) CHECK(m.metadata.at("perturbation") == "none");
}

TEST_CASE("perturbations are observable in the text") {
    auto [messages, gold] = generate_synth_datis({150, 21, 1.0});
    for (const auto& m : messages) {
        const std::string& kind = m.metadata.at("perturbation");
        if (kind == "lowercase") {
            bool has_lower = false;
            for (char c : m.text) has_lower = has_lower || (c >= 'a' && c <= 'z');
            CHECK(has_lower);
        } else if (kind == "zero_pad") {
            CHECK(m.text.find(" 0") != std::string::npos);
        }
    }
}

TEST_CASE("condition-only runways never leak into activity labels") {
    auto [messages, gold] = generate_synth_datis({300, 13, 0.0});
    std::map<std::string, RunwaySet> active_by_id;
    for (const auto& g : gold) {
        if (g.field == Field::ARRIVAL_RUNWAYS || g.field == Field::DEPARTURE_RUNWAYS) {
            const auto& set = std::get<RunwaySet>(g.value);
            active_by_id[g.message_id].insert(set.begin(), set.end());
        }
    }
    for (const auto& m : messages) {
        DatisFacts facts = extract_datis_rule_based(m.text);
        RunwaySet extracted_active = facts.arrival;
        extracted_active.insert(facts.departure.begin(), facts.departure.end());
        CHECK(extracted_active == active_by_id.at(m.id));
    }
}

TEST_CASE("synthetic timelines echo through the extraction pipeline") {
    auto [messages, gold] = generate_synth_ntml_timeline({20, 17, 0.0});
    const auto& reg = testsup::builtin_registry();
    for (std::size_t i = 0; i < messages.size(); ++i) {
        const auto& truth = std::get<std::vector<TimelineEntry>>(gold[i].value);
        MockLlmClient mock;
        mock.set_default_response(to_string(truth));
        auto extracted = build_timeline(mock, reg, messages[i].text);
        CHECK(extracted == truth);
        CHECK(!truth.empty());
        for (const auto& entry : truth) CHECK(valid_hhmm(entry.time));
    }
}

TEST_CASE("synthetic staffing reports echo through the extraction pipeline") {
    auto [messages, gold] = generate_synth_ntml_staffing({30, 23, 0.0});
    const auto& reg = testsup::builtin_registry();
    std::size_t triggered = 0, benign = 0;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        const auto& truth = std::get<TmiReport>(gold[i].value);
        (truth.triggered ? triggered : benign) += 1;
        MockLlmClient mock;
        mock.set_default_response(to_string(truth));
        TmiReport extracted = extract_staffing_tmi(mock, reg, messages[i].text);
        CHECK(extracted == truth);
    }
    CHECK(triggered > 0);
    CHECK(benign > 0);
}
