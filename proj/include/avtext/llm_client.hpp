#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "avtext/errors.hpp"
#include "avtext/prompt.hpp"
#include "avtext/strings.hpp"

// Text-generation backend contract. The wire protocol is a completions-style
// JSON POST:
//   {"model", "prompt", "temperature", "top_k", "max_tokens"}
//     -> {"choices": [{"text", "finish_reason"}]}
// Transient failures (network errors, HTTP 5xx, HTTP 429) are retried with
// exponential backoff; other 4xx never are. The api key travels only in the
// Authorization header, never in the body.

namespace avtext {

struct GenerationParams {
    double temperature = 0.0;
    int top_k = 5;
    int max_new_tokens = 512;
};

struct EndpointConfig {
    std::string base_url;  // http(s)://host[:port][/path]; path defaults per call kind
    std::string model_id;
    std::optional<std::string> api_key;
    std::chrono::milliseconds timeout{60'000};
    int max_retries = 2;
    std::chrono::milliseconds backoff_base{500};  // 0.5 s * 2^attempt, +/-20% jitter
};

enum class FinishReason { Stop, Length, Error };

struct Completion {
    std::string text;
    FinishReason finish_reason = FinishReason::Stop;
    std::chrono::milliseconds latency{0};
    int retries = 0;
};

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual Completion complete(const GenerationParams& params,
                                const RenderedPrompt& prompt) = 0;
};

// ---- scripted mock ----

// A fixture rule. `contains` is matched against the final "### Input:"
// section of the prompt when the prompt has section markers (the shots of a
// few-shot template would otherwise match every request), else against the
// whole text. `exact` demands section equality instead of substring.
struct MockRule {
    std::string contains;
    std::string response;
    bool exact = false;
    bool fail = false;          // scripted per-item failure
    int delay_ms = 0;
};

namespace detail {

inline std::string final_input_section(std::string_view prompt) {
    static constexpr std::string_view kInput = "### Input:\n";
    std::size_t pos = prompt.rfind(kInput);
    if (pos == std::string_view::npos) return std::string(prompt);
    std::size_t body = pos + kInput.size();
    std::size_t end = prompt.find("\n\n### Output:", body);
    if (end == std::string_view::npos) end = prompt.size();
    return std::string(prompt.substr(body, end - body));
}

inline const MockRule* match_mock_rule(const std::vector<MockRule>& rules,
                                       std::string_view prompt) {
    std::string section = final_input_section(prompt);
    for (const MockRule& rule : rules) {
        if (rule.exact ? (section == rule.contains)
                       : (section.find(rule.contains) != std::string::npos))
            return &rule;
    }
    return nullptr;
}

inline std::vector<MockRule> mock_rules_from_file(const std::filesystem::path& path);

inline std::vector<MockRule> mock_rules_from_json(const nlohmann::json& j) {
    std::vector<MockRule> rules;
    if (j.is_array()) {
        for (const auto& item : j) {
            MockRule r;
            r.contains = item.at("contains").get<std::string>();
            r.response = item.value("response", std::string{});
            r.exact = item.value("exact", false);
            r.fail = item.value("fail", false);
            r.delay_ms = item.value("delay_ms", 0);
            rules.push_back(std::move(r));
        }
    } else if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            rules.push_back(MockRule{k, v.get<std::string>()});
    } else {
        throw Error("mock fixture must be a JSON array or object");
    }
    return rules;
}

inline std::vector<MockRule> mock_rules_from_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw FileNotFoundError(path.string());
    std::ifstream in(path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error("mock fixture is not valid JSON: " + path.string());
    return mock_rules_from_json(j);
}

}  // namespace detail

// In-process scripted backend: first matching rule wins. Deterministic at
// temperature 0 by construction; optional seeded random delays exist to
// exercise batch-ordering guarantees.
class MockLlmClient : public LlmClient {
public:
    MockLlmClient() = default;
    explicit MockLlmClient(std::vector<MockRule> rules) : rules_(std::move(rules)) {}

    static MockLlmClient from_file(const std::filesystem::path& path) {
        return MockLlmClient(detail::mock_rules_from_file(path));
    }

    void add_rule(MockRule rule) { rules_.push_back(std::move(rule)); }
    void set_default_response(std::string text) { default_response_ = std::move(text); }
    void set_random_delay(int max_ms, std::uint64_t seed) {
        max_delay_ms_ = max_ms;
        rng_.seed(seed);
    }

    Completion complete(const GenerationParams&, const RenderedPrompt& prompt) override {
        if (prompt.text.empty()) throw Error("empty prompt");
        calls_.fetch_add(1);

        int delay = 0;
        const MockRule* rule = detail::match_mock_rule(rules_, prompt.text);
        if (rule) delay = rule->delay_ms;
        if (max_delay_ms_ > 0) {
            std::lock_guard<std::mutex> lock(mutex_);
            delay += static_cast<int>(rng_() % static_cast<std::uint64_t>(max_delay_ms_ + 1));
        }
        if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));

        if (rule && rule->fail)
            throw BackendError(500, "scripted failure for rule: " + rule->contains);
        if (rule) return Completion{rule->response, FinishReason::Stop, {}, 0};
        if (default_response_) return Completion{*default_response_, FinishReason::Stop, {}, 0};
        throw BackendError(404, "no mock rule matches prompt input");
    }

    int calls() const { return calls_.load(); }

private:
    std::vector<MockRule> rules_;
    std::optional<std::string> default_response_;
    int max_delay_ms_ = 0;
    std::mt19937_64 rng_{0};
    std::mutex mutex_;
    std::atomic<int> calls_{0};
};

// ---- HTTP backend ----

namespace detail {

struct ParsedUrl {
    std::string host_port;  // scheme://host[:port]
    std::string path;       // "" when the url has no path
};

inline ParsedUrl parse_base_url(const std::string& url) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw Error("base_url must start with http:// or https://: " + url);
    std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw Error("base_url scheme must be http or https: " + url);
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string path = url.substr(path_start);
    if (path == "/") path = "";
    return {url.substr(0, path_start), path};
}

inline bool transient_status(int status) { return status == 429 || status / 100 == 5; }

// POSTs a JSON body with the retry/backoff contract; returns the parsed
// 200-response. Shared by the completion and embedding clients.
inline nlohmann::json post_json_with_retries(const EndpointConfig& cfg,
                                             const std::string& default_path,
                                             const nlohmann::json& body,
                                             int* retries_out = nullptr) {
    ParsedUrl url = parse_base_url(cfg.base_url);
    std::string path = url.path.empty() ? default_path : url.path;

    httplib::Client client(url.host_port);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (cfg.api_key) headers.emplace("Authorization", "Bearer " + *cfg.api_key);

    std::string payload = body.dump();
    static thread_local std::mt19937_64 jitter_rng{std::random_device{}()};

    int attempts_allowed = cfg.max_retries + 1;
    std::string last_error;
    bool last_was_timeout = false;
    int last_status = 0;

    for (int attempt = 0; attempt < attempts_allowed; ++attempt) {
        if (attempt > 0) {
            double jitter = 0.8 + 0.4 * (static_cast<double>(jitter_rng() >> 11) * 0x1.0p-53);
            auto delay = std::chrono::duration_cast<std::chrono::milliseconds>(
                cfg.backoff_base * (1 << (attempt - 1)) * jitter);
            std::this_thread::sleep_for(delay);
        }
        if (retries_out) *retries_out = attempt;

        httplib::Result res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            last_was_timeout = res.error() == httplib::Error::ConnectionTimeout ||
                               res.error() == httplib::Error::Read;
            last_status = 0;
            continue;  // network failure: transient
        }
        if (res->status == 200) {
            nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
            if (parsed.is_discarded())
                throw MalformedResponseError("response body is not JSON");
            return parsed;
        }
        std::string excerpt = res->body.substr(0, 200);
        if (res->status == 401 || res->status == 403)
            throw AuthError("status " + std::to_string(res->status) + ": " + excerpt);
        if (!transient_status(res->status)) throw BackendError(res->status, excerpt);
        last_error = excerpt;
        last_was_timeout = false;
        last_status = res->status;
    }

    if (last_was_timeout) throw TimeoutError(last_error);
    throw BackendError(last_status, "retries exhausted: " + last_error);
}

}  // namespace detail

class HttpLlmClient : public LlmClient {
public:
    explicit HttpLlmClient(EndpointConfig config) : config_(std::move(config)) {
        detail::parse_base_url(config_.base_url);  // validate eagerly
    }

    const EndpointConfig& config() const { return config_; }

    Completion complete(const GenerationParams& params,
                        const RenderedPrompt& prompt) override {
        if (prompt.text.empty()) throw Error("empty prompt");
        nlohmann::json body;
        body["model"] = config_.model_id;
        body["prompt"] = prompt.text;
        body["temperature"] = params.temperature;
        body["top_k"] = params.top_k;
        body["max_tokens"] = params.max_new_tokens;

        auto started = std::chrono::steady_clock::now();
        int retries = 0;
        nlohmann::json response =
            detail::post_json_with_retries(config_, "/v1/completions", body, &retries);
        auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - started);

        Completion completion;
        try {
            const auto& choice = response.at("choices").at(0);
            completion.text = choice.at("text").get<std::string>();
            std::string reason = choice.value("finish_reason", "stop");
            completion.finish_reason = reason == "length" ? FinishReason::Length
                                       : reason == "error" ? FinishReason::Error
                                                           : FinishReason::Stop;
        } catch (const nlohmann::json::exception& e) {
            throw MalformedResponseError(e.what());
        }
        completion.latency = elapsed;
        completion.retries = retries;
        return completion;
    }

private:
    EndpointConfig config_;
};

// ---- batch completion ----

struct BatchItem {
    std::optional<Completion> completion;
    std::string error;  // non-empty when the item failed

    bool ok() const { return completion.has_value(); }
};

// Runs prompts against the client with at most `max_in_flight` outstanding
// at once. Output order matches input order; one item failing never aborts
// the rest.
inline std::vector<BatchItem> complete_batch(LlmClient& client,
                                             const GenerationParams& params,
                                             const std::vector<RenderedPrompt>& prompts,
                                             int max_in_flight) {
    if (max_in_flight < 1) throw Error("max_in_flight must be >= 1");
    std::vector<BatchItem> results(prompts.size());
    if (prompts.empty()) return results;

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < prompts.size(); i = next.fetch_add(1)) {
            try {
                results[i].completion = client.complete(params, prompts[i]);
            } catch (const std::exception& e) {
                results[i].error = e.what();
            }
        }
    };

    std::size_t n_workers =
        std::min(static_cast<std::size_t>(max_in_flight), prompts.size());
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return results;
}

}  // namespace avtext
