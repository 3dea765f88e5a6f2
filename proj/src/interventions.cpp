#include "rgap/interventions.hpp"

#include "rgap/common.hpp"

namespace rgap {

const char* prefix_variant_name(PrefixVariant variant) {
    switch (variant) {
        case PrefixVariant::Original: return "original";
        case PrefixVariant::V1: return "v1";
        case PrefixVariant::V2: return "v2";
        case PrefixVariant::V3: return "v3";
    }
    return "original";
}

PrefixVariant prefix_variant_from_name(const std::string& name) {
    if (name == "original") return PrefixVariant::Original;
    if (name == "v1") return PrefixVariant::V1;
    if (name == "v2") return PrefixVariant::V2;
    if (name == "v3") return PrefixVariant::V3;
    fail(ErrorKind::Config, "unknown prefix variant: " + name);
}

const std::string& prefix_template(PrefixVariant variant) {
    static const std::string original = assets::kUnderstandingPrefixOriginal;
    static const std::string v1 = assets::kUnderstandingPrefixV1;
    static const std::string v2 = assets::kUnderstandingPrefixV2;
    static const std::string v3 = assets::kUnderstandingPrefixV3;
    switch (variant) {
        case PrefixVariant::Original: return original;
        case PrefixVariant::V1: return v1;
        case PrefixVariant::V2: return v2;
        case PrefixVariant::V3: return v3;
    }
    return original;
}

std::string build_understanding_prefix(const std::string& x_dom, PrefixVariant variant) {
    if (x_dom.empty())
        fail(ErrorKind::Precondition, "understanding prefix requires a non-empty x_dom");
    return render_template(prefix_template(variant), {{"x_dom", x_dom}});
}

std::string build_prompt(const Sample& sample, const InstructionTable& instructions) {
    if (sample.answer_type == AnswerType::MathExpression) {
        return sample.question + "\n" + instructions.for_language(sample.language.code);
    }
    std::string options_block;
    for (std::size_t i = 0; i < sample.options.size(); ++i) {
        options_block += "(" + std::string(1, static_cast<char>('A' + i)) + ") " +
                         sample.options[i] + "\n";
    }
    std::string subject = sample.subject.empty() ? "the given subject" : sample.subject;
    return render_template(assets::kChoicePromptTemplate, {{"subject", subject},
                                                           {"question", sample.question},
                                                           {"options_block", options_block}});
}

InterventionMode intervention_mode_from(Mode mode) {
    switch (mode) {
        case Mode::Base: return InterventionMode::Base;
        case Mode::U: return InterventionMode::U;
        case Mode::T: return InterventionMode::T;
        case Mode::UT: return InterventionMode::UT;
        default:
            fail(ErrorKind::Precondition,
                 std::string("mode ") + mode_name(mode) + " is not an intervention mode");
    }
}

Mode mode_from_intervention(InterventionMode mode) {
    switch (mode) {
        case InterventionMode::Base: return Mode::Base;
        case InterventionMode::U: return Mode::U;
        case InterventionMode::T: return Mode::T;
        case InterventionMode::UT: return Mode::UT;
    }
    return Mode::Base;
}

InterventionPlan apply_intervention(const Sample& sample, InterventionMode mode,
                                    PrefixVariant variant, const InstructionTable& instructions) {
    const bool wants_prefix = mode == InterventionMode::U || mode == InterventionMode::UT;
    if (wants_prefix && sample.x_dom.empty())
        fail(ErrorKind::Precondition,
             "sample " + sample.id + " has no x_dom; required for understanding intervention");

    InterventionPlan plan;
    plan.prompt = build_prompt(sample, instructions);
    if (wants_prefix) plan.trace_prefix = build_understanding_prefix(sample.x_dom, variant);
    plan.answer_source = (mode == InterventionMode::T || mode == InterventionMode::UT)
                             ? AnswerSource::Trace
                             : AnswerSource::Response;
    return plan;
}

std::string truncate_trace(const std::string& trace, std::int64_t n_tokens,
                           const Tokenizer& tokenizer) {
    if (n_tokens <= 0) fail(ErrorKind::Precondition, "truncate_trace requires n_tokens > 0");
    if (tokenizer.count_tokens(trace) <= n_tokens) return trace;
    return tokenizer.truncate(trace, n_tokens);
}

}  // namespace rgap
