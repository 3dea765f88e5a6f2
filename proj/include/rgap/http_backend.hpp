#pragma once

#include <memory>
#include <string>

#include "rgap/backends.hpp"

namespace rgap {

// Remote endpoint settings for an OpenAI-style completions server.
// Credentials come from the environment (api_key_env), never from config.
struct HttpEndpoint {
    std::string base_url;  // e.g. "http://localhost:8080"
    std::string model;
    std::string api_key_env = "RGAP_API_KEY";
    int max_attempts = 3;
    int backoff_ms = 200;  // doubled per retry
    int timeout_s = 120;

    json to_json() const;
    static HttpEndpoint from_json(const json& j);
};

// Reasoning backend speaking the /v1/completions wire format. Trace prefixes
// are appended to the prompt text; the reply is split into trace/response at
// the end-of-think marker. Top-k and prompt logprobs are parsed when the
// server returns them; hidden states are not available over this transport.
class HttpBackend : public ReasoningBackend {
  public:
    HttpBackend(HttpEndpoint endpoint, BackendCapabilities capabilities);
    ~HttpBackend() override;

    std::string id() const override;
    const BackendCapabilities& capabilities() const override { return capabilities_; }
    const Tokenizer& tokenizer() const override { return tokenizer_; }

    GenerationRecord generate(const GenerateRequest& request) override;
    std::string continue_trace(const Sample& sample, const std::string& trace_so_far,
                               const SamplingConfig& sampling) override;

  private:
    json post_completion(const json& body);

    HttpEndpoint endpoint_;
    BackendCapabilities capabilities_;
    WhitespaceTokenizer tokenizer_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Translator/judge backed by the same completions transport.
class HttpTranslator : public PromptingTranslator {
  public:
    explicit HttpTranslator(HttpEndpoint endpoint);
    ~HttpTranslator() override;

  protected:
    std::string complete(const std::string& prompt) override;

  private:
    HttpEndpoint endpoint_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class HttpJudge : public PromptingJudge {
  public:
    explicit HttpJudge(HttpEndpoint endpoint);
    ~HttpJudge() override;

  protected:
    std::string complete(const std::string& prompt) override;

  private:
    HttpEndpoint endpoint_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Shared transport helper: POSTs JSON with bounded retries and exponential
// backoff, throwing Error(Backend) with the attempt count on failure.
json http_post_json_with_retry(const HttpEndpoint& endpoint, const std::string& path,
                               const json& body);

}  // namespace rgap
