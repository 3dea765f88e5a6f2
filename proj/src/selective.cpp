#include "rgap/selective.hpp"

#include <set>

#include "rgap/common.hpp"
#include "rgap/detection.hpp"
#include "rgap/digest.hpp"
#include "rgap/parallel.hpp"

namespace rgap {

const char* translation_strategy_name(TranslationStrategy strategy) {
    switch (strategy) {
        case TranslationStrategy::Base: return "base";
        case TranslationStrategy::Selective: return "selective";
        case TranslationStrategy::Full: return "full";
    }
    return "base";
}

TranslationStrategy translation_strategy_from_name(const std::string& name) {
    if (name == "base") return TranslationStrategy::Base;
    if (name == "selective") return TranslationStrategy::Selective;
    if (name == "full") return TranslationStrategy::Full;
    fail(ErrorKind::Config, "unknown translation strategy: " + name);
}

json SelectiveRunResult::to_json() const {
    json j;
    j["strategy"] = translation_strategy_name(strategy);
    j["cutoff"] = cutoff ? json(*cutoff) : json("full");
    j["accuracy_by_language"] = accuracy_by_language;
    j["usage_by_language"] = usage_by_language;
    j["overall_accuracy"] = overall_accuracy;
    j["overall_usage"] = overall_usage;
    j["translation_failures"] = translation_failures;
    j["seeds"] = seeds;
    return j;
}

namespace {

struct ItemOutcome {
    GenerationRecord record;
    bool flagged = false;
    bool translation_failed = false;
};

GenerationRecord cached_generate(SelectiveContext& ctx, const GenerateRequest& request, Mode mode,
                                 const std::map<std::string, json>& extras) {
    if (ctx.cache == nullptr) {
        GenerationRecord record = ctx.backend->generate(request);
        record.mode = mode;
        return record;
    }
    std::string key = cache_key(request.sample.id, mode, request.sampling.seed,
                                ctx.backend->id(), request.sampling, extras);
    if (auto hit = ctx.cache->lookup(key)) return *hit;
    GenerationRecord record = ctx.backend->generate(request);
    record.mode = mode;
    ctx.cache->store(key, record);
    return record;
}

std::map<std::string, json> stage1_extras(const SelectiveContext& ctx,
                                          std::optional<std::int64_t> cutoff, bool with_captures) {
    std::map<std::string, json> extras;
    extras["config_digest"] = ctx.config_digest;
    if (cutoff) extras["trace_cutoff"] = *cutoff;
    if (with_captures) extras["captures"] = json::array({"topk", "prompt_nll", "hidden"});
    return extras;
}

// One Base-style pass for every (sample, seed); captures only when the
// detector needs signals.
std::vector<ItemOutcome> stage1_generate(const std::vector<Sample>& samples,
                                         SelectiveContext& ctx,
                                         std::optional<std::int64_t> cutoff, bool with_captures) {
    std::vector<ItemOutcome> outcomes(samples.size() * ctx.seeds.size());
    auto extras = stage1_extras(ctx, cutoff, with_captures);
    parallel_for(outcomes.size(), [&](std::size_t i) {
        const Sample& sample = samples[i / ctx.seeds.size()];
        std::uint64_t seed = ctx.seeds[i % ctx.seeds.size()];
        GenerateRequest request;
        request.sample = sample;
        request.prompt = build_prompt(sample, *ctx.instructions);
        request.sampling = ctx.sampling;
        request.sampling.seed = seed;
        if (with_captures)
            request.capture = {Capture::Topk, Capture::PromptNll, Capture::Hidden};
        request.trace_cutoff = cutoff;
        outcomes[i].record = cached_generate(ctx, request, Mode::Base, extras);
        outcomes[i].record.seed = seed;
    });
    return outcomes;
}

// Understanding-intervention pass with the translated input as the prefix.
// Returns false (and leaves the outcome untouched) when translation fails.
bool stage2_regenerate(const Sample& sample, std::uint64_t seed, SelectiveContext& ctx, Mode mode,
                       ItemOutcome& outcome) {
    TranslationResult translated;
    try {
        translated = ctx.translator->translate(sample);
    } catch (const Error& e) {
        warn("translation failed for sample " + sample.id + ": " + e.what());
        outcome.translation_failed = true;
        return false;
    }
    std::string x_trans = translated.as_prefix_text();
    if (x_trans.empty()) {
        outcome.translation_failed = true;
        return false;
    }
    std::string prefix = build_understanding_prefix(x_trans, ctx.variant);

    GenerateRequest request;
    request.sample = sample;
    request.prompt = build_prompt(sample, *ctx.instructions);
    request.trace_prefix = prefix;
    request.sampling = ctx.sampling;
    request.sampling.seed = seed;  // stage 2 reuses the stage-1 seed

    std::map<std::string, json> extras;
    extras["config_digest"] = ctx.config_digest;
    extras["prefix_digest"] = sha256_hex(prefix);
    outcome.record = cached_generate(ctx, request, mode, extras);
    outcome.record.seed = seed;
    return true;
}

SelectiveRunResult score_outcomes(const std::vector<Sample>& samples,
                                  const std::vector<ItemOutcome>& outcomes,
                                  SelectiveContext& ctx, TranslationStrategy strategy,
                                  std::optional<std::int64_t> cutoff) {
    std::vector<GenerationRecord> records;
    records.reserve(outcomes.size());
    for (const auto& o : outcomes) records.push_back(o.record);

    ScoringOptions scoring = ctx.scoring;
    scoring.answer_source = AnswerSource::Response;
    std::vector<ScoredRecord> scored = score_records(records, samples, scoring);

    std::set<std::string> language_set;
    for (const auto& s : samples) language_set.insert(s.language.code);
    std::vector<std::string> languages(language_set.begin(), language_set.end());
    AccuracyTable accuracy = accuracy_from_scored(scored, languages, ctx.seeds);

    // Usage accounting: flagged / total, exact.
    std::map<std::string, std::pair<std::size_t, std::size_t>> usage;  // (flagged, total)
    std::size_t flagged_total = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const Sample& sample = samples[i / ctx.seeds.size()];
        auto& [flagged, total] = usage[sample.language.code];
        ++total;
        if (outcomes[i].flagged) {
            ++flagged;
            ++flagged_total;
        }
    }

    SelectiveRunResult result;
    result.strategy = strategy;
    result.cutoff = cutoff;
    result.seeds = ctx.seeds;
    double accuracy_sum = 0.0;
    for (const auto& language : languages) {
        double acc = accuracy.seed_mean(language);
        result.accuracy_by_language[language] = acc;
        accuracy_sum += acc;
        const auto& [flagged, total] = usage[language];
        result.usage_by_language[language] =
            total == 0 ? 0.0 : 100.0 * static_cast<double>(flagged) / total;
    }
    result.overall_accuracy = languages.empty() ? 0.0 : accuracy_sum / languages.size();
    result.overall_usage =
        outcomes.empty() ? 0.0 : 100.0 * static_cast<double>(flagged_total) / outcomes.size();
    for (const auto& o : outcomes) result.translation_failures += o.translation_failed ? 1 : 0;
    return result;
}

}  // namespace

SelectiveRunResult run_selective(const std::vector<Sample>& samples,
                                 const FailureDetector& detector, SelectiveContext& ctx,
                                 std::optional<std::int64_t> cutoff) {
    if (ctx.backend == nullptr || ctx.instructions == nullptr)
        fail(ErrorKind::Config, "selective run needs a backend and instruction table");
    if (ctx.translator == nullptr)
        fail(ErrorKind::Config, "selective strategy requires a configured translator");

    std::vector<ItemOutcome> outcomes = stage1_generate(samples, ctx, cutoff, true);

    // Detector pass, then sequential regeneration of flagged items (the
    // translator consumes scripted replies in order).
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const Sample& sample = samples[i / ctx.seeds.size()];
        std::uint64_t seed = ctx.seeds[i % ctx.seeds.size()];
        DetectionSignals signals =
            extract_signals(outcomes[i].record, sample.language.code, ctx.topk_k, cutoff);
        if (detector.flag(signals) != 1) continue;
        outcomes[i].flagged = true;
        stage2_regenerate(sample, seed, ctx, Mode::Selective, outcomes[i]);
    }

    return score_outcomes(samples, outcomes, ctx, TranslationStrategy::Selective, cutoff);
}

SelectiveRunResult run_baseline(const std::vector<Sample>& samples, TranslationStrategy strategy,
                                SelectiveContext& ctx) {
    if (ctx.backend == nullptr || ctx.instructions == nullptr)
        fail(ErrorKind::Config, "baseline run needs a backend and instruction table");
    if (strategy == TranslationStrategy::Selective)
        fail(ErrorKind::Precondition, "use run_selective for the selective strategy");
    if (strategy == TranslationStrategy::Full && ctx.translator == nullptr)
        fail(ErrorKind::Config, "full-translation strategy requires a configured translator");

    std::vector<ItemOutcome> outcomes = stage1_generate(samples, ctx, std::nullopt,
                                                        /*with_captures=*/false);
    if (strategy == TranslationStrategy::Full) {
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            const Sample& sample = samples[i / ctx.seeds.size()];
            std::uint64_t seed = ctx.seeds[i % ctx.seeds.size()];
            outcomes[i].flagged = true;
            stage2_regenerate(sample, seed, ctx, Mode::FullTranslation, outcomes[i]);
        }
    }
    return score_outcomes(samples, outcomes, ctx, strategy, std::nullopt);
}

}  // namespace rgap
