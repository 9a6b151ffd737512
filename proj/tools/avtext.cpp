// avtext — batch CLI for aviation text extraction, evaluation, and the
// retrieval knowledge base. Every subcommand runs against a scripted mock
// (--mock fixture / hash embedder) so nothing here needs a live backend.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "avtext/avtext.hpp"

namespace {

using namespace avtext;

#ifndef AVTEXT_REPO_DATA_DIR
#define AVTEXT_REPO_DATA_DIR "data"
#endif

struct KeyValueConfig {
    std::map<std::string, std::string> values;

    static KeyValueConfig from_file(const std::filesystem::path& path) {
        KeyValueConfig cfg;
        std::ifstream in(path);
        if (!in) throw FileNotFoundError(path.string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string_view s = trim(line);
            if (s.empty() || s.front() == '#') continue;
            std::size_t eq = s.find('=');
            if (eq == std::string_view::npos)
                throw MalformedRecordError(line_no, "expected key = value");
            cfg.values[std::string(trim(s.substr(0, eq)))] =
                std::string(trim(s.substr(eq + 1)));
        }
        return cfg;
    }

    std::optional<std::string> get(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        return it->second;
    }
};

std::optional<std::string> env_value(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

// Flag > env var > config file > built-in default.
struct Options {
    std::string config_file;
    std::string data_dir;
    std::string llm_url, llm_model, llm_key;
    std::string embed_url, embed_model;
    double temperature = 0.0;
    int top_k = 5;
    int max_new_tokens = 512;
    int timeout_s = 60;
    int max_retries = 2;
    std::string mock_fixture;
    bool offline = false;
    int jobs = 4;
    std::string out_path;
    std::string feedback_log;
    std::string feedback = "none";

    // which flags the user actually passed (CLI11 count() checked post-parse)
    std::set<std::string> given;

    void resolve() {
        KeyValueConfig file;
        if (!config_file.empty()) file = KeyValueConfig::from_file(config_file);
        auto pick = [&](const std::string& flag, std::string& slot, const char* env,
                        const std::string& key) {
            if (given.count(flag)) return;
            if (auto v = env_value(env)) {
                slot = *v;
                return;
            }
            if (auto v = file.get(key)) slot = *v;
        };
        pick("--data-dir", data_dir, "AVTEXT_DATA_DIR", "data_dir");
        pick("--llm-url", llm_url, "AVTEXT_LLM_URL", "llm_url");
        pick("--llm-model", llm_model, "AVTEXT_LLM_MODEL", "llm_model");
        pick("--llm-key", llm_key, "AVTEXT_LLM_KEY", "llm_key");
        pick("--embed-url", embed_url, "AVTEXT_EMBED_URL", "embed_url");
        pick("--embed-model", embed_model, "AVTEXT_EMBED_MODEL", "embed_model");

        auto pick_num = [&](const std::string& flag, auto& slot, const std::string& key) {
            if (given.count(flag)) return;
            if (auto v = file.get(key)) {
                std::istringstream in(*v);
                in >> slot;
                if (in.fail()) throw Error("config key " + key + " is not a number: " + *v);
            }
        };
        pick_num("--temperature", temperature, "temperature");
        pick_num("--top-k", top_k, "top_k");
        pick_num("--max-new-tokens", max_new_tokens, "max_new_tokens");
        pick_num("--timeout", timeout_s, "timeout_s");
        pick_num("--max-retries", max_retries, "max_retries");
        if (data_dir.empty()) data_dir = AVTEXT_REPO_DATA_DIR;
    }

    GenerationParams params() const {
        GenerationParams p;
        p.temperature = temperature;
        p.top_k = top_k;
        p.max_new_tokens = max_new_tokens;
        return p;
    }

    EndpointConfig endpoint(const std::string& url, const std::string& model) const {
        EndpointConfig cfg;
        cfg.base_url = url;
        cfg.model_id = model;
        if (!llm_key.empty()) cfg.api_key = llm_key;
        cfg.timeout = std::chrono::seconds(timeout_s);
        cfg.max_retries = max_retries;
        return cfg;
    }

    std::unique_ptr<LlmClient> make_client() const {
        if (!mock_fixture.empty())
            return std::make_unique<MockLlmClient>(detail::mock_rules_from_file(mock_fixture));
        if (!llm_url.empty())
            return std::make_unique<HttpLlmClient>(endpoint(llm_url, llm_model));
        throw CLI::ValidationError(
            "no backend configured: pass --mock <fixture>, --llm-url, or set "
            "AVTEXT_LLM_URL");
    }

    TemplateRegistry registry() const {
        return TemplateRegistry::load_dir(std::filesystem::path(data_dir) / "templates");
    }

    MetarGlossary glossary() const {
        return MetarGlossary::from_file(std::filesystem::path(data_dir) /
                                        "metar_glossary.tsv");
    }
};

void add_common_options(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_file, "Key-value config file");
    cmd->add_option("--data-dir", opt.data_dir, "Directory holding templates/ and glossary");
    cmd->add_option("--llm-url", opt.llm_url, "Completion backend base url");
    cmd->add_option("--llm-model", opt.llm_model, "Model id sent to the backend");
    cmd->add_option("--llm-key", opt.llm_key, "API key (Authorization header only)");
    cmd->add_option("--temperature", opt.temperature, "Sampling temperature (default 0)");
    cmd->add_option("--top-k", opt.top_k, "Top-k sampling (default 5)");
    cmd->add_option("--max-new-tokens", opt.max_new_tokens, "Max new tokens (default 512)");
    cmd->add_option("--timeout", opt.timeout_s, "Request timeout, seconds");
    cmd->add_option("--max-retries", opt.max_retries, "Transient-failure retries");
    cmd->add_option("--mock", opt.mock_fixture, "Scripted mock fixture (JSON rules)");
    cmd->add_option("--out", opt.out_path, "Write output here instead of stdout");
    cmd->add_option("--feedback-log", opt.feedback_log, "Append feedback records here");
    cmd->add_option("--feedback", opt.feedback, "Feedback rating: up, down, or none");
}

void record_given(CLI::App* cmd, Options& opt) {
    for (const auto* o : cmd->get_options())
        if (o->count() > 0) opt.given.insert(o->get_name());
    for (auto* sub : cmd->get_subcommands({}))
        record_given(sub, opt);
}

std::ostream& output_stream(const Options& opt, std::ofstream& file) {
    if (opt.out_path.empty()) return std::cout;
    file.open(opt.out_path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write " + opt.out_path);
    return file;
}

void append_feedback(const Options& opt, const std::string& command,
                     const std::string& detail) {
    if (opt.feedback_log.empty()) return;
    std::ofstream log(opt.feedback_log, std::ios::app);
    if (!log) throw IoError("cannot append to " + opt.feedback_log);
    nlohmann::json j;
    j["command"] = command;
    j["detail"] = detail;
    j["rating"] = opt.feedback;
    log << j.dump() << '\n';
}

// ---- extract ----

struct ExtractArgs {
    std::string in_path;
    std::string format = "jsonl";
    std::string template_id;
    bool raw = false;
};

std::vector<RawMessage> load_input_corpus(const ExtractArgs& args) {
    return load_corpus(args.in_path, args.format == "csv" ? CorpusFormat::CSV
                                                          : CorpusFormat::JSONL);
}

// No-backend path: the deterministic rule-based extractor, emitting the
// same per-field outcome records the LLM path does.
int run_extract_datis_offline(const Options& opt, const ExtractArgs& args) {
    auto corpus = load_input_corpus(args);
    std::ofstream file;
    std::ostream& out = output_stream(opt, file);
    for (const auto& m : corpus) {
        DatisFacts facts = extract_datis_rule_based(m.text);
        std::vector<ExtractionOutcome> outcomes{
            {m.id, Field::ARRIVAL_RUNWAYS, facts.arrival, "", "rule_based"},
            {m.id, Field::DEPARTURE_RUNWAYS, facts.departure, "", "rule_based"},
            {m.id, Field::CLOSED_RUNWAYS, facts.closed_runways, "", "rule_based"},
            {m.id, Field::CLOSED_TAXIWAYS,
             TaxiwayList(facts.closed_taxiways.begin(), facts.closed_taxiways.end()), "",
             "rule_based"},
        };
        write_outcomes(outcomes, out);
    }
    append_feedback(opt, "extract datis --offline", args.in_path);
    return 0;
}

int run_extract_datis(const Options& opt, const ExtractArgs& args) {
    if (opt.offline) return run_extract_datis_offline(opt, args);
    auto corpus = load_input_corpus(args);
    TemplateRegistry reg = opt.registry();
    std::string template_id =
        args.template_id.empty() ? "datis_arr_dep_runways" : args.template_id;
    const PromptTemplate& tmpl = reg.get(template_id);

    bool parseable = template_id == "datis_arr_dep_runways" ||
                     template_id == "datis_closed_runways" ||
                     template_id == "datis_closed_taxiways";
    if (!parseable && !args.raw)
        throw CLI::ValidationError("template " + template_id +
                                   " has no typed output parser; pass --raw to emit raw "
                                   "model text");

    auto client = opt.make_client();
    std::vector<RenderedPrompt> prompts;
    prompts.reserve(corpus.size());
    for (const auto& m : corpus) prompts.push_back(render(tmpl, m.text));
    auto results = complete_batch(*client, opt.params(), prompts, opt.jobs);

    std::ofstream file;
    std::ostream& out = output_stream(opt, file);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!results[i].ok())
            throw BackendError(0, "message " + corpus[i].id + ": " + results[i].error);
        const std::string& text = results[i].completion->text;
        if (args.raw && !parseable) {
            nlohmann::json j;
            j["message_id"] = corpus[i].id;
            j["template_id"] = template_id;
            j["raw_model_text"] = text;
            out << j.dump() << '\n';
            continue;
        }
        std::vector<ExtractionOutcome> outcomes;
        if (template_id == "datis_arr_dep_runways") {
            RunwaySet arrival =
                parse_runway_list(labeled_answer_line(text, "Arrival Runways"));
            RunwaySet departure =
                parse_runway_list(labeled_answer_line(text, "Departure Runways"));
            outcomes.push_back(
                {corpus[i].id, Field::ARRIVAL_RUNWAYS, arrival, text, template_id});
            outcomes.push_back(
                {corpus[i].id, Field::DEPARTURE_RUNWAYS, departure, text, template_id});
        } else if (template_id == "datis_closed_runways") {
            RunwaySet closed =
                parse_runway_list(labeled_answer_line(text, "Closed Runways"));
            outcomes.push_back(
                {corpus[i].id, Field::CLOSED_RUNWAYS, closed, text, template_id});
        } else {
            TaxiwayList closed =
                parse_taxiway_list(labeled_answer_line(text, "Closed Taxiways"));
            outcomes.push_back(
                {corpus[i].id, Field::CLOSED_TAXIWAYS, closed, text, template_id});
        }
        write_outcomes(outcomes, out);
    }
    append_feedback(opt, "extract datis", args.in_path);
    return 0;
}

int run_extract_per_message(const Options& opt, const ExtractArgs& args, Field field,
                            const std::string& template_id, const std::string& command) {
    auto corpus = load_input_corpus(args);
    TemplateRegistry reg = opt.registry();
    const PromptTemplate& tmpl = reg.get(template_id);
    auto client = opt.make_client();

    std::vector<RenderedPrompt> prompts;
    prompts.reserve(corpus.size());
    for (const auto& m : corpus) prompts.push_back(render(tmpl, m.text));
    auto results = complete_batch(*client, opt.params(), prompts, opt.jobs);

    std::ofstream file;
    std::ostream& out = output_stream(opt, file);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!results[i].ok())
            throw BackendError(0, "message " + corpus[i].id + ": " + results[i].error);
        const std::string& text = results[i].completion->text;
        FieldValue value;
        switch (field) {
            case Field::TIMELINE: value = parse_timeline_output(text); break;
            case Field::TMI_REPORT: value = parse_tmi_output(text); break;
            default: value = std::string(detail::strip_quotes(text));
        }
        write_outcomes({{corpus[i].id, field, value, text, template_id}}, out);
    }
    append_feedback(opt, command, args.in_path);
    return 0;
}

// ---- decode metar ----

int run_decode_metar(const Options& opt, const std::string& code) {
    std::ofstream file;
    std::ostream& out = output_stream(opt, file);
    std::string expansion;
    if (opt.offline) {
        expansion = opt.glossary().decode(code);
    } else {
        auto client = opt.make_client();
        TemplateRegistry reg = opt.registry();
        expansion = decode_metar_llm(*client, reg, code, opt.params());
    }
    out << expansion << '\n';
    append_feedback(opt, "decode metar", code);
    return 0;
}

// ---- eval ----

int run_eval(const Options& opt, const std::string& pred_path,
             const std::string& gold_path, const std::string& method,
             const std::string& format, const std::string& corpus_path, bool timestamp) {
    auto predictions = load_outcomes(pred_path);
    auto gold = load_gold(gold_path);
    if (!corpus_path.empty())
        require_gold_references(gold, load_corpus(corpus_path));

    EvalReport report = evaluate(predictions, gold, method,
                                 std::filesystem::path(gold_path).stem().string());
    if (timestamp) {
        std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        report.generated_at = buf;
    }
    ReportFormat fmt = format == "json"  ? ReportFormat::Json
                       : format == "csv" ? ReportFormat::Csv
                                         : ReportFormat::TextTable;
    std::ofstream file;
    std::ostream& out = output_stream(opt, file);
    out << render_report(report, fmt);
    if (!report.missing_gold.empty())
        std::cerr << "warning: " << report.missing_gold.size()
                  << " prediction(s) had no gold labels and were skipped\n";
    return 0;
}

// ---- knowledge base ----

std::unique_ptr<Embedder> make_embedder(const Options& opt, std::size_t hash_dim) {
    if (!opt.embed_url.empty())
        return std::make_unique<HttpEmbedder>(opt.endpoint(opt.embed_url, opt.embed_model));
    return std::make_unique<HashEmbedder>(hash_dim);
}

int run_kb_build(const Options& opt, const std::string& docs_dir,
                 const std::string& store_path, std::size_t limit, std::size_t overlap,
                 std::size_t dim) {
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(docs_dir))
        throw FileNotFoundError(docs_dir + " (document directory)");
    for (const auto& entry : std::filesystem::directory_iterator(docs_dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension();
        if (ext == ".txt" || ext == ".md") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no .txt or .md documents in " + docs_dir);

    auto embedder = make_embedder(opt, dim);
    VectorStore store;
    std::size_t total_chunks = 0;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::ostringstream content;
        content << in.rdbuf();
        auto chunks = chunk_document(f.stem().string(), content.str(), limit, overlap);
        std::vector<std::string> texts;
        for (const auto& c : chunks) texts.push_back(c.text);
        auto vectors = embedder->embed(texts);
        for (std::size_t i = 0; i < chunks.size(); ++i) store.upsert(chunks[i], vectors[i]);
        total_chunks += chunks.size();
    }
    store.persist(store_path);

    std::ofstream file;
    std::ostream& out = output_stream(opt, file);
    nlohmann::json j;
    j["documents"] = files.size();
    j["chunks"] = total_chunks;
    j["dim"] = store.dim();
    j["store"] = store_path;
    out << j.dump() << '\n';
    return 0;
}

int run_kb_query(const Options& opt, const std::string& question,
                 const std::string& store_path, std::size_t k, bool answer) {
    VectorStore store = VectorStore::load(store_path);
    auto embedder = make_embedder(opt, store.dim());
    auto qvec = embedder->embed({question});
    auto hits = store.query(qvec[0], k);

    std::ofstream file;
    std::ostream& out = output_stream(opt, file);
    for (const auto& hit : hits) {
        nlohmann::json j;
        j["doc_id"] = hit.chunk.doc_id;
        j["seq"] = hit.chunk.seq;
        j["score"] = hit.score;
        j["text"] = hit.chunk.text;
        out << j.dump() << '\n';
    }
    if (answer) {
        PromptTemplate qa{"rag_qa",
                          "Answer the question using only the provided context passages.",
                          {},
                          "ad-hoc document QA"};
        RenderedPrompt prompt = assemble_rag_prompt(question, hits, qa);
        auto client = opt.make_client();
        Completion completion = client->complete(opt.params(), prompt);
        nlohmann::json j;
        j["answer"] = std::string(trim(completion.text));
        out << j.dump() << '\n';
    }
    append_feedback(opt, "kb query", question);
    return 0;
}

// ---- dataset / gen / templates ----

int run_dataset_export(const Options& opt, const std::string& in_path,
                       const std::string& out_path) {
    auto records = load_instruction_dataset(in_path);
    std::size_t written = export_instruction_dataset(records, out_path);
    std::ofstream file;
    std::ostream& out = output_stream(opt, file);
    out << written << '\n';
    return 0;
}

int run_gen_synth_datis(const Options&, int n, std::uint64_t seed, double noise,
                        const std::string& out_dir) {
    SynthSpec spec{n, seed, noise};
    auto [messages, gold] = generate_synth_datis(spec);
    std::filesystem::create_directories(out_dir);

    std::ofstream corpus_out(std::filesystem::path(out_dir) / "corpus.jsonl",
                             std::ios::binary | std::ios::trunc);
    for (const auto& m : messages) {
        nlohmann::json j;
        j["id"] = m.id;
        j["source"] = to_string(m.source);
        j["text"] = m.text;
        j["metadata"] = m.metadata;
        corpus_out << j.dump() << '\n';
    }
    std::ofstream gold_out(std::filesystem::path(out_dir) / "gold.jsonl",
                           std::ios::binary | std::ios::trunc);
    for (const auto& g : gold) {
        nlohmann::json j;
        j["message_id"] = g.message_id;
        j["field"] = to_string(g.field);
        j["value"] = serialize_field_value(g.value);
        gold_out << j.dump() << '\n';
    }
    if (!corpus_out || !gold_out) throw IoError("short write under " + out_dir);
    std::cerr << "wrote " << messages.size() << " messages and " << gold.size()
              << " gold labels to " << out_dir << '\n';
    return 0;
}

int run_templates_list(const Options& opt) {
    TemplateRegistry reg = opt.registry();
    std::ofstream file;
    std::ostream& out = output_stream(opt, file);
    for (const auto& [id, description] : reg.list()) out << id << '\t' << description << '\n';
    return 0;
}

int classify_error(const Error& e) {
    if (dynamic_cast<const TimeoutError*>(&e) || dynamic_cast<const AuthError*>(&e) ||
        dynamic_cast<const BackendError*>(&e) ||
        dynamic_cast<const MalformedResponseError*>(&e) ||
        dynamic_cast<const MissingAnswerLineError*>(&e) ||
        dynamic_cast<const InconsistentAnswerError*>(&e))
        return 3;
    return 2;
}

}  // namespace

void enable_fallthrough(CLI::App* app) {
    for (auto* sub : app->get_subcommands({})) {
        sub->fallthrough(true);
        enable_fallthrough(sub);
    }
}

int main(int argc, char** argv) {
    CLI::App app{"avtext — aviation text extraction toolkit"};
    app.require_subcommand(1);

    Options opt;
    ExtractArgs extract_args;
    add_common_options(&app, opt);

    // extract
    auto* extract = app.add_subcommand("extract", "Run LLM extraction over a corpus");
    extract->require_subcommand(1);
    auto add_extract_opts = [&](CLI::App* cmd) {
        cmd->add_option("--in", extract_args.in_path, "Input corpus (JSONL or CSV)")
            ->required();
        cmd->add_option("--format", extract_args.format, "Corpus format: jsonl or csv")
            ->check(CLI::IsMember({"jsonl", "csv"}));
        cmd->add_option("--jobs", opt.jobs, "Max in-flight requests (default 4)");
    };
    auto* ex_datis = extract->add_subcommand("datis", "DATIS fact extraction");
    ex_datis->add_option("--template", extract_args.template_id,
                         "Template id (default datis_arr_dep_runways)");
    ex_datis->add_flag("--raw", extract_args.raw, "Emit raw model text for templates "
                                                  "without a typed parser");
    ex_datis->add_flag("--offline", opt.offline,
                       "Use the deterministic rule-based extractor, no backend");
    add_extract_opts(ex_datis);
    auto* ex_timeline = extract->add_subcommand("ntml-timeline", "NTML timeline building");
    add_extract_opts(ex_timeline);
    auto* ex_tmi = extract->add_subcommand("ntml-tmi", "NTML staffing/TMI extraction");
    add_extract_opts(ex_tmi);
    auto* ex_clean = extract->add_subcommand("clean-transcript", "Voice transcript cleanup");
    add_extract_opts(ex_clean);

    // decode metar
    auto* decode = app.add_subcommand("decode", "Decode coded terminology");
    decode->require_subcommand(1);
    auto* de_metar = decode->add_subcommand("metar", "Expand a METAR abbreviation");
    std::string metar_code;
    de_metar->add_option("code", metar_code, "METAR abbreviation, e.g. SH")->required();
    de_metar->add_flag("--offline", opt.offline, "Use the shipped glossary, no backend");

    // eval run
    auto* eval_cmd = app.add_subcommand("eval", "Score predictions against gold labels");
    eval_cmd->require_subcommand(1);
    auto* eval_run = eval_cmd->add_subcommand("run", "Evaluate a prediction file");
    std::string pred_path, gold_path, method = "model", report_format = "table",
                corpus_path;
    bool timestamp = false;
    eval_run->add_option("--pred", pred_path, "Predictions JSONL")->required();
    eval_run->add_option("--gold", gold_path, "Gold labels JSONL")->required();
    eval_run->add_option("--method", method, "Method name for the report");
    eval_run->add_option("--format", report_format, "table, json, or csv")
        ->check(CLI::IsMember({"table", "json", "csv"}));
    eval_run->add_option("--corpus", corpus_path, "Cross-check gold message ids");
    eval_run->add_flag("--timestamp", timestamp, "Stamp the report with the current time");

    // kb
    auto* kb = app.add_subcommand("kb", "Knowledge-base build and query");
    kb->require_subcommand(1);
    auto* kb_build = kb->add_subcommand("build", "Chunk, embed, and index documents");
    std::string docs_dir, store_path = "kb.store";
    std::size_t chunk_limit = 500, chunk_overlap = 0, embed_dim = 64;
    kb_build->add_option("--docs", docs_dir, "Directory of .txt/.md documents")->required();
    kb_build->add_option("--store", store_path, "Store file (default kb.store)");
    kb_build->add_option("--chunk-limit", chunk_limit, "Tokens per chunk (default 500)");
    kb_build->add_option("--overlap", chunk_overlap, "Token overlap between chunks");
    kb_build->add_option("--dim", embed_dim, "Hash-embedder dimension (mock mode)");
    kb_build->add_option("--embed-url", opt.embed_url, "Embedding backend base url");
    kb_build->add_option("--embed-model", opt.embed_model, "Embedding model id");

    auto* kb_query = kb->add_subcommand("query", "Retrieve top-k chunks for a question");
    std::string question;
    std::size_t top_k_hits = 5;
    bool answer = false;
    kb_query->add_option("question", question, "Question text")->required();
    kb_query->add_option("--store", store_path, "Store file (default kb.store)");
    kb_query->add_option("--k", top_k_hits, "Hits to return (default 5)");
    kb_query->add_flag("--answer", answer, "Assemble a RAG prompt and complete it");
    kb_query->add_option("--embed-url", opt.embed_url, "Embedding backend base url");
    kb_query->add_option("--embed-model", opt.embed_model, "Embedding model id");

    // dataset export
    auto* dataset = app.add_subcommand("dataset", "Instruction-tuning dataset tools");
    dataset->require_subcommand(1);
    auto* ds_export = dataset->add_subcommand("export", "Validate and export records");
    std::string ds_in, ds_out;
    ds_export->add_option("--in", ds_in, "Input records JSONL")->required();
    ds_export->add_option("--out-file", ds_out, "Output dataset path")->required();

    // gen synth-datis
    auto* gen = app.add_subcommand("gen", "Synthetic corpus generation");
    gen->require_subcommand(1);
    auto* gen_datis = gen->add_subcommand("synth-datis", "Seeded synthetic DATIS corpus");
    int synth_n = 100;
    std::uint64_t synth_seed = 0;
    double synth_noise = 0.0;
    std::string synth_out;
    gen_datis->add_option("--n", synth_n, "Messages to generate");
    gen_datis->add_option("--seed", synth_seed, "Generator seed");
    gen_datis->add_option("--noise", synth_noise, "Per-message perturbation probability");
    gen_datis->add_option("--out-dir", synth_out,
                          "Output directory for corpus.jsonl and gold.jsonl");

    // templates list
    auto* templates = app.add_subcommand("templates", "Prompt template registry");
    templates->require_subcommand(1);
    auto* tlist = templates->add_subcommand("list", "List template ids and descriptions");

    enable_fallthrough(&app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        record_given(&app, opt);
        opt.resolve();

        if (ex_datis->parsed()) return run_extract_datis(opt, extract_args);
        if (ex_timeline->parsed())
            return run_extract_per_message(opt, extract_args, Field::TIMELINE,
                                           "ntml_timeline", "extract ntml-timeline");
        if (ex_tmi->parsed())
            return run_extract_per_message(opt, extract_args, Field::TMI_REPORT,
                                           "ntml_staffing_tmi", "extract ntml-tmi");
        if (ex_clean->parsed())
            return run_extract_per_message(opt, extract_args, Field::CLEANED_TEXT,
                                           "transcript_clean", "extract clean-transcript");
        if (de_metar->parsed()) return run_decode_metar(opt, metar_code);
        if (eval_run->parsed())
            return run_eval(opt, pred_path, gold_path, method, report_format, corpus_path,
                            timestamp);
        if (kb_build->parsed())
            return run_kb_build(opt, docs_dir, store_path, chunk_limit, chunk_overlap,
                                embed_dim);
        if (kb_query->parsed())
            return run_kb_query(opt, question, store_path, top_k_hits, answer);
        if (ds_export->parsed()) return run_dataset_export(opt, ds_in, ds_out);
        if (gen_datis->parsed()) {
            // --out is accepted as the directory too
            if (synth_out.empty()) synth_out = opt.out_path;
            if (synth_out.empty())
                throw CLI::ValidationError("gen synth-datis needs --out <dir>");
            return run_gen_synth_datis(opt, synth_n, synth_seed, synth_noise, synth_out);
        }
        if (tlist->parsed()) return run_templates_list(opt);
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return classify_error(e);
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
}
