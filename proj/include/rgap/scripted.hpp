#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rgap/backends.hpp"

namespace rgap {

// Declarative scripted behaviors for the reasoning model, translator and
// judge. Everything is a pure function of its lookup key, so pipelines built
// on top are bit-reproducible without a GPU.
//
// Fixture file layout (JSON):
//   backend_id, capabilities{...}, vocab_size,
//   default_generation{trace, response},
//   generations: [{sample_id, mode, seed, trace, response, finish_reason?,
//                  topk_logprobs?: [[[id, logprob], ...] per trace token],
//                  prompt_logprobs?: [...],
//                  hidden_state?: [...],                 (full-trace capture)
//                  hidden_state_by_cutoff?: {"2048": [...]}}],
//   translations: {sample_id | "*": [reply, ...]},       (consumed per call)
//   monitor_responses: {sample_id | "*": [reply, ...]},
//   assessment_responses: {hypothesis | "*": [reply, ...]},
//   extraction_responses: {question_or_options | "*": [reply, ...]},
//   reflections: {sample_id | "*": continuation text},
//   prompt_nll_per_token: number                          (optional override)
//
// Generation lookup keys on (sample_id, mode, seed) where mode is inferred
// from the request: a trace prefix selects "U" (then "UT"), no prefix selects
// "base" (then "T"). Entries store the continuation; the backend prepends the
// requested prefix itself. Missing keys fall back to default_generation.
//
// Signal arrays omitted from the fixture are synthesized deterministically
// per trace token, so signals at positions before a cutoff never depend on
// later tokens.
struct ScriptedFixture {
    std::string backend_id = "scripted";
    BackendCapabilities capabilities;
    int vocab_size = 1000;
    std::optional<double> prompt_nll_per_token;

    struct Generation {
        std::string trace;
        std::string response;
        FinishReason finish_reason = FinishReason::Stop;
        std::optional<std::vector<std::vector<TopkEntry>>> topk_rows;  // per trace token
        std::optional<std::vector<double>> prompt_logprobs;
        std::optional<std::vector<double>> hidden_state;
        std::map<std::int64_t, std::vector<double>> hidden_state_by_cutoff;
    };

    std::optional<Generation> default_generation;
    std::map<std::string, Generation> generations;  // key: sample_id|mode|seed

    std::map<std::string, std::vector<std::string>> translations;
    std::map<std::string, std::vector<std::string>> monitor_responses;
    std::map<std::string, std::vector<std::string>> assessment_responses;
    std::map<std::string, std::vector<std::string>> extraction_responses;
    std::map<std::string, std::string> reflections;

    static ScriptedFixture from_json(const json& j);
    static ScriptedFixture load(const std::string& path);
    json to_json() const;
    void save(const std::string& path) const;

    static std::string generation_key(const std::string& sample_id, const std::string& mode,
                                      std::uint64_t seed);
};

class ScriptedBackend : public ReasoningBackend {
  public:
    explicit ScriptedBackend(ScriptedFixture fixture);

    std::string id() const override { return fixture_.backend_id; }
    const BackendCapabilities& capabilities() const override { return fixture_.capabilities; }
    const Tokenizer& tokenizer() const override { return tokenizer_; }

    GenerationRecord generate(const GenerateRequest& request) override;
    std::string continue_trace(const Sample& sample, const std::string& trace_so_far,
                               const SamplingConfig& sampling) override;

    std::size_t generate_call_count() const { return generate_calls_.load(); }

  private:
    const ScriptedFixture::Generation& resolve(const std::string& sample_id, bool with_prefix,
                                               std::uint64_t seed) const;

    ScriptedFixture fixture_;
    WhitespaceTokenizer tokenizer_;
    std::atomic<std::size_t> generate_calls_{0};
};

// Serves scripted replies to the prompting translator/judge. Replies are
// consumed per key in order; the last reply repeats once the list is
// exhausted. "*" is the fallback key.
class ScriptedReplySource {
  public:
    explicit ScriptedReplySource(std::map<std::string, std::vector<std::string>> replies);
    std::string next(const std::string& key);

  private:
    std::map<std::string, std::vector<std::string>> replies_;
    std::map<std::string, std::size_t> cursor_;
};

class ScriptedTranslator : public PromptingTranslator {
  public:
    explicit ScriptedTranslator(const ScriptedFixture& fixture);
    TranslationResult translate(const Sample& sample) override;

    std::size_t call_count() const { return calls_; }

  protected:
    std::string complete(const std::string& prompt) override;

  private:
    ScriptedReplySource replies_;
    std::string current_key_;
    std::size_t calls_ = 0;
};

class ScriptedJudge : public PromptingJudge {
  public:
    explicit ScriptedJudge(const ScriptedFixture& fixture);

    MonitorVerdict monitor(const Sample& sample, const std::string& trace) override;
    int assess_translation(const std::string& source, const std::string& hypothesis,
                           const std::string& src_lang, const std::string& tgt_lang) override;
    std::string extract(const std::string& question_or_options, const std::string& trace,
                        AnswerType answer_type) override;

  protected:
    std::string complete(const std::string& prompt) override;

  private:
    ScriptedReplySource monitor_replies_;
    ScriptedReplySource assessment_replies_;
    ScriptedReplySource extraction_replies_;
    ScriptedReplySource* active_ = nullptr;
    std::string current_key_;
};

}  // namespace rgap
