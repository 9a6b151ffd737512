#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <sys/wait.h>

#include <json.hpp>

#include "avtext/corpus.hpp"
#include "avtext/extractors.hpp"
#include "support.hpp"

// End-to-end checks of the installed command surface, run as subprocesses.

#ifndef AVTEXT_CLI_BIN
#error "AVTEXT_CLI_BIN must be defined by the build"
#endif

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

CliResult run_cli(const std::string& args, bool merge_stderr = false) {
    std::string cmd = std::string(AVTEXT_CLI_BIN) + " --data-dir " +
                      testsup::data_dir().string() + " " + args +
                      (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::vector<nlohmann::json> parse_jsonl(const std::string& text) {
    std::vector<nlohmann::json> out;
    for (const std::string& line : avtext::split_lines(text)) {
        if (avtext::trim(line).empty()) continue;
        out.push_back(nlohmann::json::parse(line));
    }
    return out;
}

}  // namespace

TEST_CASE("decode metar --offline prints the glossary expansion") {
    CliResult r = run_cli("decode metar SH --offline");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "Shower\n");

    CHECK(run_cli("decode metar ZZZZ9 --offline").exit_code == 2);
}

TEST_CASE("decode metar with a mock backend") {
    testsup::TempDir tmp("cli");
    testsup::write_file(tmp.file("mock.json"),
                        R"([{"contains": "SH", "exact": true, "response": "Shower"}])");
    CliResult r = run_cli("decode metar SH --mock " + q(tmp.file("mock.json")));
    CHECK(r.exit_code == 0);
    CHECK(r.output == "Shower\n");
}

TEST_CASE("extract datis over the published sample texts matches the model columns") {
    std::string args = "extract datis --in " +
                       q(testsup::fixtures_dir() / "datis_samples.jsonl") + " --template "
                       "datis_arr_dep_runways --mock " +
                       q(testsup::fixtures_dir() / "datis_samples_mock.json");
    CliResult r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    auto records = parse_jsonl(r.output);
    REQUIRE(records.size() == 8);  // one record per (message, field)

    std::map<std::pair<std::string, std::string>, std::string> values;
    for (const auto& j : records)
        values[{j.at("message_id"), j.at("field")}] = j.at("value");
    CHECK(values.at({"datis-1", "ARRIVAL_RUNWAYS"}) == "None");
    CHECK(values.at({"datis-1", "DEPARTURE_RUNWAYS"}) == "36C, 36R");
    CHECK(values.at({"datis-2", "ARRIVAL_RUNWAYS"}) == "31");
    CHECK(values.at({"datis-2", "DEPARTURE_RUNWAYS"}) == "31");
    CHECK(values.at({"datis-3", "ARRIVAL_RUNWAYS"}) == "8L");
    CHECK(values.at({"datis-3", "DEPARTURE_RUNWAYS"}) == "15L");
    CHECK(values.at({"datis-4", "ARRIVAL_RUNWAYS"}) == "32L, 32R, 36");
    CHECK(values.at({"datis-4", "DEPARTURE_RUNWAYS"}) == "None");

    // identical invocations produce byte-identical output
    CliResult again = run_cli(args);
    CHECK(again.output == r.output);
}

TEST_CASE("extract datis --offline runs the rule-based extractor") {
    CliResult r = run_cli("extract datis --offline --in " +
                          q(testsup::fixtures_dir() / "datis_samples.jsonl"));
    REQUIRE(r.exit_code == 0);
    auto records = parse_jsonl(r.output);
    REQUIRE(records.size() == 16);  // four fields per message
    std::map<std::pair<std::string, std::string>, std::string> values;
    for (const auto& j : records)
        values[{j.at("message_id"), j.at("field")}] = j.at("value");
    CHECK(values.at({"datis-1", "DEPARTURE_RUNWAYS"}) == "36C, 36R");
    CHECK(values.at({"datis-4", "ARRIVAL_RUNWAYS"}) == "32L, 32R, 36");
}

TEST_CASE("extract ntml-timeline writes parsed timeline outcomes") {
    testsup::TempDir tmp("cli");
    nlohmann::json msg;
    msg["id"] = "pbi";
    msg["source"] = "NTML";
    msg["text"] = testsup::read_fixture_text("pbi_input.txt");
    testsup::write_file(tmp.file("ntml.jsonl"), msg.dump() + "\n");

    CliResult r = run_cli("extract ntml-timeline --in " + q(tmp.file("ntml.jsonl")) +
                          " --mock " + q(testsup::fixtures_dir() / "ntml_mock.json"));
    REQUIRE(r.exit_code == 0);
    auto records = parse_jsonl(r.output);
    REQUIRE(records.size() == 1);
    auto timeline = avtext::parse_timeline_output(records[0].at("value").get<std::string>());
    REQUIRE(timeline.size() == 5);
    CHECK(timeline[4].event == "GDP proposal sent");
}

TEST_CASE("extract ntml-tmi writes parsed staffing reports") {
    testsup::TempDir tmp("cli");
    nlohmann::json msg;
    msg["id"] = "sct";
    msg["source"] = "NTML";
    msg["text"] = testsup::read_fixture_text("sct_input.txt");
    testsup::write_file(tmp.file("ntml.jsonl"), msg.dump() + "\n");

    CliResult r = run_cli("extract ntml-tmi --in " + q(tmp.file("ntml.jsonl")) +
                          " --mock " + q(testsup::fixtures_dir() / "ntml_mock.json"));
    REQUIRE(r.exit_code == 0);
    auto records = parse_jsonl(r.output);
    REQUIRE(records.size() == 1);
    auto report = avtext::parse_tmi_output(records[0].at("value").get<std::string>());
    CHECK(report.triggered);
    CHECK(report.tmis.size() == 6);
}

TEST_CASE("extract clean-transcript trims the corrected text") {
    testsup::TempDir tmp("cli");
    nlohmann::json msg;
    msg["id"] = "v1";
    msg["source"] = "TRANSCRIPT";
    msg["text"] =
        "delta twenty five oh one ground roger make that left turn on foxtrot hold short "
        "of ramp three make the right";
    testsup::write_file(tmp.file("voice.jsonl"), msg.dump() + "\n");

    CliResult r =
        run_cli("extract clean-transcript --in " + q(tmp.file("voice.jsonl")) + " --mock " +
                q(testsup::fixtures_dir() / "transcript_mock.json"));
    REQUIRE(r.exit_code == 0);
    auto records = parse_jsonl(r.output);
    REQUIRE(records.size() == 1);
    CHECK(records[0].at("value") ==
          "Delta 2501, ground roger. Make a left turn onto Foxtrot and hold short of "
          "Ramp 3. Then, make a right turn.");
}

TEST_CASE("gen + extract --offline + eval round trip scores a perfect table") {
    testsup::TempDir tmp("cli");
    CliResult gen = run_cli("gen synth-datis --n 40 --seed 9 --noise 0 --out-dir " +
                            q(tmp.path()));
    REQUIRE(gen.exit_code == 0);
    REQUIRE(std::filesystem::exists(tmp.file("corpus.jsonl")));
    REQUIRE(std::filesystem::exists(tmp.file("gold.jsonl")));

    // generated corpora are deterministic per seed
    testsup::TempDir tmp2("cli");
    run_cli("gen synth-datis --n 40 --seed 9 --noise 0 --out-dir " + q(tmp2.path()));
    CHECK(testsup::read_file(tmp.file("corpus.jsonl")) ==
          testsup::read_file(tmp2.file("corpus.jsonl")));

    CliResult extract = run_cli("extract datis --offline --in " +
                                q(tmp.file("corpus.jsonl")) + " --out " +
                                q(tmp.file("pred.jsonl")));
    REQUIRE(extract.exit_code == 0);

    CliResult eval = run_cli("eval run --pred " + q(tmp.file("pred.jsonl")) + " --gold " +
                             q(tmp.file("gold.jsonl")) + " --method rules --format csv");
    REQUIRE(eval.exit_code == 0);
    for (const std::string& line : avtext::split_lines(eval.output)) {
        if (line.rfind("rules,", 0) == 0)
            CHECK(line.substr(line.find_last_of(',') + 1) == "1");
    }

    CliResult table = run_cli("eval run --pred " + q(tmp.file("pred.jsonl")) + " --gold " +
                              q(tmp.file("gold.jsonl")) + " --method rules");
    CHECK(table.output.find("100%") != std::string::npos);
}

TEST_CASE("eval run with a missing gold file is a data error") {
    CliResult r = run_cli("eval run --pred /nonexistent/p.jsonl --gold /nonexistent/g.jsonl");
    CHECK(r.exit_code == 2);
}

TEST_CASE("eval run cross-checks gold ids against a corpus when asked") {
    testsup::TempDir tmp("cli");
    run_cli("extract datis --offline --in " +
            q(testsup::fixtures_dir() / "datis_samples.jsonl") + " --out " +
            q(tmp.file("pred.jsonl")));
    std::string base = "eval run --pred " + q(tmp.file("pred.jsonl")) + " --gold " +
                       q(testsup::fixtures_dir() / "datis_samples_gold.jsonl");
    CHECK(run_cli(base + " --corpus " +
                  q(testsup::fixtures_dir() / "datis_samples.jsonl"))
              .exit_code == 0);

    testsup::write_file(tmp.file("ghost_gold.jsonl"),
                        R"({"message_id": "ghost", "field": "ARRIVAL_RUNWAYS", "value": "8L"})"
                        "\n");
    CHECK(run_cli("eval run --pred " + q(tmp.file("pred.jsonl")) + " --gold " +
                  q(tmp.file("ghost_gold.jsonl")) + " --corpus " +
                  q(testsup::fixtures_dir() / "datis_samples.jsonl"))
              .exit_code == 2);
}

TEST_CASE("kb build and query work offline with the hash embedder") {
    testsup::TempDir tmp("cli");
    testsup::write_file(tmp.file("docs/ftn.txt"),
                        "The FTN is a number assigned to you by the FAA that stays with "
                        "you throughout the course of your aviation career.\n");
    testsup::write_file(tmp.file("docs/weather.md"),
                        "METAR reports describe wind visibility clouds temperature and "
                        "altimeter settings for an airport.\n");

    CliResult build = run_cli("kb build --docs " + q(tmp.file("docs")) + " --store " +
                              q(tmp.file("kb.store")));
    REQUIRE(build.exit_code == 0);
    auto summary = nlohmann::json::parse(build.output);
    CHECK(summary.at("documents") == 2);
    CHECK(summary.at("chunks") == 2);

    CliResult query = run_cli("kb query 'What is the FTN assigned by the FAA?' --k 1 "
                              "--store " + q(tmp.file("kb.store")));
    REQUIRE(query.exit_code == 0);
    auto hits = parse_jsonl(query.output);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].at("doc_id") == "ftn");

    testsup::write_file(tmp.file("mock.json"),
                        R"([{"contains": "What is the FTN", "response": "The FTN is a number assigned to you by the FAA."}])");
    CliResult answered = run_cli("kb query 'What is the FTN assigned by the FAA?' --k 1 "
                                 "--answer --store " + q(tmp.file("kb.store")) +
                                 " --mock " + q(tmp.file("mock.json")));
    REQUIRE(answered.exit_code == 0);
    auto lines = parse_jsonl(answered.output);
    REQUIRE(lines.size() == 2);
    CHECK(lines[1].at("answer").get<std::string>().find("assigned to you by the FAA") !=
          std::string::npos);
}

TEST_CASE("dataset export validates and reports the count") {
    testsup::TempDir tmp("cli");
    testsup::write_file(
        tmp.file("records.jsonl"),
        R"({"instruction": "Decode METAR terminology.", "input": "SH", "output": "Shower"})"
        "\n"
        R"({"instruction": "Question-answering.", "input": "What is the FTN?", "output": "A number assigned by the FAA."})"
        "\n");
    CliResult r = run_cli("dataset export --in " + q(tmp.file("records.jsonl")) +
                          " --out-file " + q(tmp.file("out.jsonl")));
    REQUIRE(r.exit_code == 0);
    CHECK(r.output == "2\n");
    CHECK(avtext::load_instruction_dataset(tmp.file("out.jsonl")).size() == 2);

    testsup::write_file(tmp.file("bad.jsonl"), R"({"instruction": "x"})"
                                               "\n");
    CHECK(run_cli("dataset export --in " + q(tmp.file("bad.jsonl")) + " --out-file " +
                  q(tmp.file("out2.jsonl")))
              .exit_code == 2);
}

TEST_CASE("templates list prints the nine built-ins") {
    CliResult r = run_cli("templates list");
    REQUIRE(r.exit_code == 0);
    auto lines = avtext::split_lines(r.output);
    REQUIRE(lines.size() == 9);
    CHECK(lines[0].rfind("datis_arr_dep_runways\t", 0) == 0);
    CHECK(lines[8].rfind("transcript_clean\t", 0) == 0);
}

TEST_CASE("raw passthrough covers templates without typed parsers") {
    testsup::TempDir tmp("cli");
    testsup::write_file(tmp.file("mock.json"),
                        R"([{"contains": "", "response": "32L: 5 5 5 AT 0446Z"}])");
    std::string args = "extract datis --template datis_surface_conditions --in " +
                       q(testsup::fixtures_dir() / "datis_samples.jsonl") + " --mock " +
                       q(tmp.file("mock.json"));
    CHECK(run_cli(args).exit_code == 1);  // refuses without --raw

    CliResult r = run_cli(args + " --raw");
    REQUIRE(r.exit_code == 0);
    auto records = parse_jsonl(r.output);
    REQUIRE(records.size() == 4);
    CHECK(records[0].at("raw_model_text") == "32L: 5 5 5 AT 0446Z");
    CHECK_FALSE(records[0].contains("value"));
}

TEST_CASE("usage errors exit 1") {
    CHECK(run_cli("no-such-command").exit_code == 1);
    CHECK(run_cli("extract datis").exit_code == 1);  // missing --in
    CHECK(run_cli("extract datis --in x.jsonl --format xml").exit_code == 1);
}

TEST_CASE("backend failures exit 3") {
    // unreachable loopback port, no retries to keep it quick
    CliResult r = run_cli("decode metar SH --llm-url http://127.0.0.1:9 --llm-model m "
                          "--max-retries 0 --timeout 2");
    CHECK(r.exit_code == 3);
}

TEST_CASE("gen synth-datis accepts --out as the output directory") {
    testsup::TempDir tmp("cli");
    CliResult r = run_cli("gen synth-datis --n 3 --seed 4 --noise 0 --out " + q(tmp.path()));
    CHECK(r.exit_code == 0);
    CHECK(std::filesystem::exists(tmp.file("corpus.jsonl")));
    CHECK(avtext::load_corpus(tmp.file("corpus.jsonl")).size() == 3);
    CHECK(avtext::load_gold(tmp.file("gold.jsonl")).size() == 12);
}

TEST_CASE("option resolution order is flag > env > config file") {
    testsup::TempDir tmp("cli");
    // raw invocation without the harness --data-dir so resolution is visible
    auto bare = [&](const std::string& args, const std::string& env) {
        std::string cmd = env + " " + std::string(AVTEXT_CLI_BIN) + " " + args +
                          " 2>/dev/null >/dev/null";
        int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    std::string good = testsup::data_dir().string();
    std::string bogus = (tmp.path() / "nope").string();
    testsup::write_file(tmp.file("good.conf"), "data_dir = " + good + "\n");
    testsup::write_file(tmp.file("bogus.conf"), "data_dir = " + bogus + "\n");

    // config file alone resolves
    CHECK(bare("templates list --config " + q(tmp.file("good.conf")), "env") == 0);
    // env beats config file
    CHECK(bare("templates list --config " + q(tmp.file("bogus.conf")),
               "env AVTEXT_DATA_DIR=" + good) == 0);
    CHECK(bare("templates list --config " + q(tmp.file("good.conf")),
               "env AVTEXT_DATA_DIR=" + bogus) == 2);
    // flag beats env
    CHECK(bare("templates list --data-dir " + good, "env AVTEXT_DATA_DIR=" + bogus) == 0);
}

TEST_CASE("feedback log appends one record per rated invocation") {
    testsup::TempDir tmp("cli");
    run_cli("decode metar SH --offline --feedback-log " + q(tmp.file("fb.jsonl")) +
            " --feedback up");
    run_cli("decode metar RA --offline --feedback-log " + q(tmp.file("fb.jsonl")) +
            " --feedback down");
    auto records = parse_jsonl(testsup::read_file(tmp.file("fb.jsonl")));
    REQUIRE(records.size() == 2);
    CHECK(records[0].at("rating") == "up");
    CHECK(records[1].at("rating") == "down");
    CHECK(records[0].at("command") == "decode metar");
}
