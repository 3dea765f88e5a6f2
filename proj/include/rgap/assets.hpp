#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rgap/types.hpp"

namespace rgap {

// Versioned prompt/template assets. Each constant carries a version tag so
// detector artifacts and manifests can pin the exact template they used.
// Template slots use {name} placeholders filled by render_template.
namespace assets {

inline constexpr const char* kAssetVersion = "v1";

// Trace prefixes that inject the reference interpretation of the input.
extern const char* kUnderstandingPrefixOriginal;
extern const char* kUnderstandingPrefixV1;
extern const char* kUnderstandingPrefixV2;
extern const char* kUnderstandingPrefixV3;

// Judge prompt deciding whether the input was understood.
extern const char* kMonitorPrompt;

// Continuation instruction for trace-level self-assessment.
extern const char* kSelfReflectionInstruction;

// Translator prompts: math text with LaTeX preserved; choice tasks as a
// key-preserving JSON payload.
extern const char* kTranslateMathPrompt;
extern const char* kTranslateChoicePayloadPrompt;

// Fallback answer-extraction prompts (math -> \boxed{...}, choice -> Answer: X).
extern const char* kExtractMathPrompt;
extern const char* kExtractChoicePrompt;

// Direct-assessment rubric for translation quality, 0..100.
extern const char* kTranslationAssessmentPrompt;

// Prompt asking the reasoning model itself to translate (quality study).
extern const char* kElicitTranslationPrompt;

// Choice-task prompt scaffold (English form).
extern const char* kChoicePromptTemplate;

// English instruction suffix for math prompts.
extern const char* kMathInstructionEn;

// English closing-phrase pattern for choice answers.
extern const char* kChoiceClosingPatternEn;

}  // namespace assets

// Replaces each {slot} in `tmpl` with its value from `slots`. Unknown slots
// are an error; values are inserted verbatim (no escaping).
std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& slots);

// Per-language instruction strings for math prompts. English ships built in;
// other languages come from user-supplied asset tables (no automatic
// translation of instruction strings).
class InstructionTable {
  public:
    InstructionTable();

    void set(const std::string& language, const std::string& instruction);
    void load_json(const json& table);

    // Throws Error(Config) naming the language when no instruction exists.
    const std::string& for_language(const std::string& language) const;
    bool has(const std::string& language) const;

  private:
    std::map<std::string, std::string> table_;
};

// Per-language closing-phrase patterns for choice answers. Languages without
// a dedicated pattern fall back to the English pattern.
class ClosingPatternTable {
  public:
    ClosingPatternTable();

    void set(const std::string& language, const std::string& pattern);
    void load_json(const json& table);
    const std::string& for_language(const std::string& language) const;

  private:
    std::map<std::string, std::string> table_;
    std::string fallback_;
};

}  // namespace rgap
