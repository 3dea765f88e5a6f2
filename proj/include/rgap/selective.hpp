#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rgap/backends.hpp"
#include "rgap/cache.hpp"
#include "rgap/classifiers.hpp"
#include "rgap/extraction.hpp"
#include "rgap/interventions.hpp"

namespace rgap {

enum class TranslationStrategy { Base, Selective, Full };

const char* translation_strategy_name(TranslationStrategy strategy);
TranslationStrategy translation_strategy_from_name(const std::string& name);

struct SelectiveRunResult {
    TranslationStrategy strategy = TranslationStrategy::Base;
    std::optional<std::int64_t> cutoff;  // nullopt = full trace
    std::map<std::string, double> accuracy_by_language;  // seed-mean, percent
    std::map<std::string, double> usage_by_language;     // seed-mean, percent
    double overall_accuracy = 0.0;  // unweighted mean over languages
    double overall_usage = 0.0;     // sample-weighted (flagged / total)
    int translation_failures = 0;
    std::vector<std::uint64_t> seeds;

    json to_json() const;
};

struct SelectiveContext {
    ReasoningBackend* backend = nullptr;
    Translator* translator = nullptr;  // required for selective/full strategies
    const InstructionTable* instructions = nullptr;
    ScoringOptions scoring;
    SamplingConfig sampling;  // seed field overridden per run
    std::vector<std::uint64_t> seeds = kDefaultSeeds;
    PrefixVariant variant = PrefixVariant::Original;
    int topk_k = 20;
    GenerationCache* cache = nullptr;  // optional record reuse
    std::string config_digest;         // participates in cache extras
};

// Stage 1: Base-style generation capturing detector signals (truncated at the
// cutoff when given). Stage 2: detector-flagged instances are re-generated
// with the understanding prefix built from the translated input; unflagged
// instances keep their stage-1 outputs. Translation failures keep stage-1
// output and are tallied.
SelectiveRunResult run_selective(const std::vector<Sample>& samples,
                                 const FailureDetector& detector, SelectiveContext& ctx,
                                 std::optional<std::int64_t> cutoff = std::nullopt);

// base: plain Base-mode scoring, usage 0%. full: every sample routed through
// the translated-prefix path, usage 100%.
SelectiveRunResult run_baseline(const std::vector<Sample>& samples, TranslationStrategy strategy,
                                SelectiveContext& ctx);

}  // namespace rgap
