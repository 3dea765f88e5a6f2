#pragma once

#include <optional>
#include <string>

#include "rgap/assets.hpp"
#include "rgap/backends.hpp"
#include "rgap/types.hpp"

namespace rgap {

// Phrasings of the trace prefix that injects the reference interpretation.
enum class PrefixVariant { Original, V1, V2, V3 };

const char* prefix_variant_name(PrefixVariant variant);
PrefixVariant prefix_variant_from_name(const std::string& name);
const std::string& prefix_template(PrefixVariant variant);

// Exact template substitution; x_dom is inserted verbatim, no escaping.
std::string build_understanding_prefix(const std::string& x_dom, PrefixVariant variant);

// Dataset prompt: math tasks are question + per-language instruction; choice
// tasks use the subject/options scaffold with the closing-phrase instruction.
std::string build_prompt(const Sample& sample, const InstructionTable& instructions);

enum class InterventionMode { Base, U, T, UT };

InterventionMode intervention_mode_from(Mode mode);
Mode mode_from_intervention(InterventionMode mode);

struct InterventionPlan {
    std::string prompt;
    std::optional<std::string> trace_prefix;             // set iff mode is U or UT
    AnswerSource answer_source = AnswerSource::Response;  // trace iff mode is T or UT
};

InterventionPlan apply_intervention(const Sample& sample, InterventionMode mode,
                                    PrefixVariant variant, const InstructionTable& instructions);

// At most n_tokens tokens under the backend tokenizer; shorter traces pass
// through unchanged.
std::string truncate_trace(const std::string& trace, std::int64_t n_tokens,
                           const Tokenizer& tokenizer);

}  // namespace rgap
