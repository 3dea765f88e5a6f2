#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "rgap/types.hpp"

namespace rgap {

using ordered_json = nlohmann::ordered_json;

struct BackendCapabilities {
    bool supports_trace_prefix = false;
    bool supports_topk_logprobs = false;
    bool supports_prompt_logprobs = false;
    bool supports_hidden_state = false;
    std::optional<int> hidden_dim;
    std::string end_of_think_marker = "</think>";

    void validate() const;  // supports_hidden_state => hidden_dim > 0

    json to_json() const;
    static BackendCapabilities from_json(const json& j);
};

enum class Capture { Topk, PromptNll, Hidden };
using CaptureSet = std::set<Capture>;

struct GenerateRequest {
    Sample sample;
    std::string prompt;
    std::optional<std::string> trace_prefix;
    SamplingConfig sampling;
    CaptureSet capture;
    std::optional<std::int64_t> trace_cutoff;
};

// Token counting/truncation under the backend's own tokenization. truncate()
// returns an exact prefix of the input text covering at most n tokens.
class Tokenizer {
  public:
    virtual ~Tokenizer() = default;
    virtual std::int64_t count_tokens(const std::string& text) const = 0;
    virtual std::string truncate(const std::string& text, std::int64_t n) const = 0;
};

// Splits text into whitespace-delimited tokens; each token keeps its trailing
// whitespace so that concatenation reproduces the input byte-for-byte.
class WhitespaceTokenizer : public Tokenizer {
  public:
    std::int64_t count_tokens(const std::string& text) const override;
    std::string truncate(const std::string& text, std::int64_t n) const override;
};

class ReasoningBackend {
  public:
    virtual ~ReasoningBackend() = default;

    virtual std::string id() const = 0;
    virtual const BackendCapabilities& capabilities() const = 0;
    virtual const Tokenizer& tokenizer() const = 0;

    // Runs one generation. When trace_prefix is given the returned trace
    // begins exactly with it; when trace_cutoff is given the trace holds at
    // most that many tokens and hidden capture is taken at the cut point.
    virtual GenerationRecord generate(const GenerateRequest& request) = 0;

    // Continues a (possibly instruction-extended) trace deterministically.
    // Used by the self-assessment detector.
    virtual std::string continue_trace(const Sample& sample, const std::string& trace_so_far,
                                       const SamplingConfig& sampling) = 0;
};

// Verifies capability preconditions shared by all backend implementations.
void check_generate_preconditions(const GenerateRequest& request,
                                  const BackendCapabilities& caps);

// ---------------------------------------------------------------------------
// Translator

struct TranslationResult {
    std::string text;      // math path: content between the wrapping tags
    ordered_json payload;  // choice path: translated payload, same keys/order
    bool is_payload = false;

    // Text form usable as the dominant-language interpretation of the input.
    std::string as_prefix_text() const;
};

class Translator {
  public:
    virtual ~Translator() = default;
    virtual TranslationResult translate(const Sample& sample) = 0;
};

// Builds the dataset-appropriate translation prompt, calls complete(), and
// parses/validates the reply with one repair retry.
class PromptingTranslator : public Translator {
  public:
    TranslationResult translate(const Sample& sample) override;

  protected:
    virtual std::string complete(const std::string& prompt) = 0;
};

// Payload sent to the choice-task translator: question plus option_i keys in
// their original order.
ordered_json build_choice_payload(const Sample& sample);

// ---------------------------------------------------------------------------
// Judge

struct MonitorVerdict {
    bool understood = true;
    std::string reason;
    bool parse_failed = false;
};

class Judge {
  public:
    virtual ~Judge() = default;

    virtual MonitorVerdict monitor(const Sample& sample, const std::string& trace) = 0;
    virtual int assess_translation(const std::string& source, const std::string& hypothesis,
                                   const std::string& src_lang, const std::string& tgt_lang) = 0;
    // Returns the extracted answer or the NO_ANSWER sentinel.
    virtual std::string extract(const std::string& question_or_options, const std::string& trace,
                                AnswerType answer_type) = 0;
};

class PromptingJudge : public Judge {
  public:
    MonitorVerdict monitor(const Sample& sample, const std::string& trace) override;
    int assess_translation(const std::string& source, const std::string& hypothesis,
                           const std::string& src_lang, const std::string& tgt_lang) override;
    std::string extract(const std::string& question_or_options, const std::string& trace,
                        AnswerType answer_type) override;

  protected:
    virtual std::string complete(const std::string& prompt) = 0;
};

}  // namespace rgap
