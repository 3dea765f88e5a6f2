#include "rgap/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "rgap/common.hpp"

namespace rgap {

json HttpEndpoint::to_json() const {
    json j;
    j["base_url"] = base_url;
    j["model"] = model;
    j["api_key_env"] = api_key_env;
    j["max_attempts"] = max_attempts;
    j["backoff_ms"] = backoff_ms;
    j["timeout_s"] = timeout_s;
    return j;
}

HttpEndpoint HttpEndpoint::from_json(const json& j) {
    HttpEndpoint e;
    e.base_url = j.at("base_url").get<std::string>();
    e.model = j.value("model", std::string());
    e.api_key_env = j.value("api_key_env", e.api_key_env);
    e.max_attempts = j.value("max_attempts", e.max_attempts);
    e.backoff_ms = j.value("backoff_ms", e.backoff_ms);
    e.timeout_s = j.value("timeout_s", e.timeout_s);
    return e;
}

json http_post_json_with_retry(const HttpEndpoint& endpoint, const std::string& path,
                               const json& body) {
    httplib::Client client(endpoint.base_url);
    client.set_read_timeout(endpoint.timeout_s, 0);
    client.set_connection_timeout(endpoint.timeout_s, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(endpoint.api_key_env.c_str()); key != nullptr && key[0])
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string payload = body.dump();
    std::string last_error;
    int backoff = endpoint.backoff_ms;
    for (int attempt = 1; attempt <= endpoint.max_attempts; ++attempt) {
        auto res = client.Post(path, headers, payload, "application/json");
        if (res && res->status >= 200 && res->status < 300) {
            json parsed = json::parse(res->body, nullptr, false);
            if (!parsed.is_discarded()) return parsed;
            last_error = "invalid JSON in response body";
        } else if (res) {
            last_error = "HTTP status " + std::to_string(res->status);
            // 4xx other than 429 will not succeed on retry.
            if (res->status >= 400 && res->status < 500 && res->status != 429)
                fail(ErrorKind::Backend, "backend request rejected (" + last_error + ") after " +
                                             std::to_string(attempt) + " attempt(s)");
        } else {
            last_error = "transport failure (" + httplib::to_string(res.error()) + ")";
        }
        if (attempt < endpoint.max_attempts) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
    }
    fail(ErrorKind::Backend, "backend request failed (" + last_error + ") after " +
                                 std::to_string(endpoint.max_attempts) + " attempts");
}

namespace {

std::string completion_text(const json& reply) {
    if (!reply.contains("choices") || reply.at("choices").empty())
        fail(ErrorKind::Backend, "completion reply has no choices");
    const auto& choice = reply.at("choices").at(0);
    return choice.value("text", std::string());
}

std::string run_completion(const HttpEndpoint& endpoint, const std::string& prompt,
                           double temperature) {
    json body;
    body["model"] = endpoint.model;
    body["prompt"] = prompt;
    body["temperature"] = temperature;
    json reply = http_post_json_with_retry(endpoint, "/v1/completions", body);
    return completion_text(reply);
}

}  // namespace

struct HttpBackend::Impl {};
struct HttpTranslator::Impl {};
struct HttpJudge::Impl {};

HttpBackend::HttpBackend(HttpEndpoint endpoint, BackendCapabilities capabilities)
    : endpoint_(std::move(endpoint)), capabilities_(std::move(capabilities)) {
    // Hidden states do not travel over the completions wire format.
    if (capabilities_.supports_hidden_state)
        fail(ErrorKind::Config, "hidden-state capture is not available over the HTTP backend");
    capabilities_.validate();
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::id() const { return "http:" + endpoint_.model; }

json HttpBackend::post_completion(const json& body) {
    return http_post_json_with_retry(endpoint_, "/v1/completions", body);
}

GenerationRecord HttpBackend::generate(const GenerateRequest& request) {
    check_generate_preconditions(request, capabilities_);

    std::string prompt = request.prompt;
    if (request.trace_prefix) prompt += "\n<think>\n" + *request.trace_prefix;

    json body;
    body["model"] = endpoint_.model;
    body["prompt"] = prompt;
    body["temperature"] = request.sampling.temperature;
    body["top_p"] = request.sampling.top_p;
    body["top_k"] = request.sampling.top_k;
    body["seed"] = request.sampling.seed;
    body["max_tokens"] = request.trace_cutoff ? *request.trace_cutoff
                                              : request.sampling.max_new_tokens;
    if (request.capture.count(Capture::Topk)) body["logprobs"] = request.sampling.top_k;
    if (request.capture.count(Capture::PromptNll)) body["prompt_logprobs"] = true;

    json reply = post_completion(body);
    const auto& choice = reply.at("choices").at(0);
    std::string text = choice.value("text", std::string());

    GenerationRecord record;
    record.sample_id = request.sample.id;
    record.mode = request.trace_prefix ? Mode::U : Mode::Base;
    record.seed = request.sampling.seed;
    record.backend_id = id();
    record.finish_reason = choice.value("finish_reason", std::string("stop")) == "length"
                               ? FinishReason::Length
                               : FinishReason::Stop;

    const std::string& marker = capabilities_.end_of_think_marker;
    auto marker_pos = text.find(marker);
    std::string trace = marker_pos == std::string::npos ? text : text.substr(0, marker_pos);
    if (request.trace_prefix) trace = *request.trace_prefix + trace;
    record.trace = trace;
    record.response =
        marker_pos == std::string::npos ? std::string() : text.substr(marker_pos + marker.size());
    while (!record.response.empty() && record.response.front() == '\n')
        record.response.erase(record.response.begin());
    record.trace_token_count = tokenizer_.count_tokens(record.trace);

    if (request.capture.count(Capture::Topk) && choice.contains("logprobs")) {
        const auto& lp = choice.at("logprobs");
        if (lp.contains("top_logprobs")) {
            TopkMatrix m;
            std::size_t width = 0;
            for (const auto& row : lp.at("top_logprobs")) width = std::max(width, row.size());
            m.width = width;
            for (const auto& row : lp.at("top_logprobs")) {
                std::vector<TopkEntry> entries;
                std::int32_t next_id = 0;
                for (auto it = row.begin(); it != row.end(); ++it)
                    entries.push_back({next_id++, it.value().get<double>()});
                std::sort(entries.begin(), entries.end(),
                          [](const TopkEntry& a, const TopkEntry& b) { return a.logprob > b.logprob; });
                entries.resize(width, entries.empty() ? TopkEntry{0, -27.631021115928547}
                                                      : entries.back());
                m.entries.insert(m.entries.end(), entries.begin(), entries.end());
            }
            record.topk_logprobs = std::move(m);
        }
    }
    if (request.capture.count(Capture::PromptNll) && reply.contains("prompt_logprobs"))
        record.prompt_token_logprobs = reply.at("prompt_logprobs").get<std::vector<double>>();

    return record;
}

std::string HttpBackend::continue_trace(const Sample&, const std::string& trace_so_far,
                                        const SamplingConfig& sampling) {
    json body;
    body["model"] = endpoint_.model;
    body["prompt"] = trace_so_far;
    body["temperature"] = sampling.temperature;
    body["max_tokens"] = 64;
    json reply = post_completion(body);
    return trace_so_far + completion_text(reply);
}

HttpTranslator::HttpTranslator(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
HttpTranslator::~HttpTranslator() = default;

std::string HttpTranslator::complete(const std::string& prompt) {
    return run_completion(endpoint_, prompt, 0.0);
}

HttpJudge::HttpJudge(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
HttpJudge::~HttpJudge() = default;

std::string HttpJudge::complete(const std::string& prompt) {
    // Deterministic decoding for judge calls.
    return run_completion(endpoint_, prompt, 0.0);
}

}  // namespace rgap
