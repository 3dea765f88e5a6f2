#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rgap/assets.hpp"
#include "rgap/backends.hpp"
#include "rgap/types.hpp"

namespace rgap {

inline constexpr const char* kNoAnswer = "NO_ANSWER";

inline bool is_no_answer(const std::string& answer) { return answer == kNoAnswer; }

enum class ExtractionMethod { Pattern, LlmFallback };

struct ExtractionResult {
    std::string answer = kNoAnswer;
    ExtractionMethod method = ExtractionMethod::Pattern;
    AnswerSource source = AnswerSource::Response;
};

// Content of the last \boxed{...} in the text, scanned with balanced braces
// so nested braces survive. Empty optional when no boxed span exists.
std::optional<std::string> last_boxed_content(const std::string& text);

struct ExtractionContext {
    AnswerType answer_type = AnswerType::MathExpression;
    std::string question;
    std::vector<std::string> options;
    std::string closing_pattern = assets::kChoiceClosingPatternEn;
    Judge* fallback = nullptr;  // optional LLM fallback extractor
};

ExtractionResult extract_final_answer(const std::string& text, const ExtractionContext& ctx);

// ---------------------------------------------------------------------------
// Verification

class MathChecker {
  public:
    virtual ~MathChecker() = default;
    virtual bool equivalent(const std::string& candidate, const std::string& gold) const = 0;
};

// Self-contained checker: strips LaTeX wrappers and whitespace, parses
// rationals/decimals (including \frac forms) and compares numerically with
// absolute tolerance 1e-9, falling back to normalized string equality.
class DefaultMathChecker : public MathChecker {
  public:
    bool equivalent(const std::string& candidate, const std::string& gold) const override;

    static std::string normalize(const std::string& s);
    static std::optional<double> parse_number(const std::string& s);
};

const MathChecker& default_math_checker();

bool verify_answer(const std::string& candidate, const std::string& gold, AnswerType answer_type,
                   const MathChecker& checker = default_math_checker());

// ---------------------------------------------------------------------------
// Scoring

struct ScoredRecord {
    std::string sample_id;
    std::string language;
    std::uint64_t seed = 0;
    std::string answer = kNoAnswer;
    bool correct = false;
    ExtractionMethod method = ExtractionMethod::Pattern;
};

struct AccuracyCell {
    int correct = 0;
    int total = 0;
    double accuracy() const { return total == 0 ? 0.0 : 100.0 * correct / total; }
};

struct AccuracyTable {
    std::map<std::string, std::map<std::uint64_t, AccuracyCell>> cells;  // language -> seed
    std::vector<std::uint64_t> seeds;

    double accuracy(const std::string& language, std::uint64_t seed) const;
    double seed_mean(const std::string& language) const;
    std::vector<double> per_seed(const std::string& language) const;
    std::vector<std::string> languages() const;
};

struct ScoringOptions {
    AnswerSource answer_source = AnswerSource::Response;
    ClosingPatternTable closing_patterns;
    Judge* fallback = nullptr;
    const MathChecker* checker = nullptr;  // default checker when null
};

// Applies identical extraction logic to trace or response text as selected by
// answer_source, then verifies against each sample's gold answer.
std::vector<ScoredRecord> score_records(const std::vector<GenerationRecord>& records,
                                        const std::vector<Sample>& samples,
                                        const ScoringOptions& options);

// Folds per-record verdicts into per-(language, seed) accuracy. Throws an
// incomplete-run error listing every expected cell with no records.
AccuracyTable accuracy_from_scored(const std::vector<ScoredRecord>& scored,
                                   const std::vector<std::string>& expected_languages,
                                   const std::vector<std::uint64_t>& expected_seeds);

AccuracyTable score_accuracy(const std::vector<GenerationRecord>& records,
                             const std::vector<Sample>& samples, const ScoringOptions& options,
                             const std::vector<std::string>& expected_languages,
                             const std::vector<std::uint64_t>& expected_seeds);

}  // namespace rgap
