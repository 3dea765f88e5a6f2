#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rgap {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Languages

enum class ResourceTier { High, Mid, Low };

struct LanguageTag {
    std::string code;  // ISO-639-1/2, lowercase
    ResourceTier tier = ResourceTier::High;

    // Tier from the built-in grouping: en/de/es/ar/ja/ko high, th/bn mid,
    // sw/te low (fr high, mr/wo low). Unknown codes default to mid.
    static LanguageTag for_code(const std::string& code);
};

const char* resource_tier_name(ResourceTier tier);
ResourceTier resource_tier_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Samples

enum class DatasetId {
    PolymathLow,
    PolymathMedium,
    PolymathHigh,
    MmluProxLite,
    MgsmCal,
    MmluProxVal,
    Custom,
};

enum class AnswerType { MathExpression, ChoiceLetter };

struct Sample {
    std::string id;
    DatasetId dataset = DatasetId::Custom;
    LanguageTag language;
    std::string question;
    std::string x_dom;  // reference dominant-language translation
    std::vector<std::string> options;  // empty for math tasks, <= 10 entries
    std::string gold;
    AnswerType answer_type = AnswerType::MathExpression;
    std::string subject;  // optional, used by the choice prompt header

    void validate() const;  // throws Error(Schema) naming the offending field
};

const char* dataset_name(DatasetId id);
DatasetId dataset_from_name(const std::string& name);
const char* answer_type_name(AnswerType type);
AnswerType answer_type_from_name(const std::string& name);

json sample_to_json(const Sample& sample);
Sample sample_from_json(const json& j);

std::vector<Sample> load_samples(const std::string& path);
void save_samples(const std::string& path, const std::vector<Sample>& samples);

// ---------------------------------------------------------------------------
// Sampling

struct SamplingConfig {
    double temperature = 0.6;
    double top_p = 0.95;
    int top_k = 20;
    int max_new_tokens = 32768;
    std::uint64_t seed = 42;

    json to_json() const;
    static SamplingConfig from_json(const json& j);
};

inline const std::vector<std::uint64_t> kDefaultSeeds = {32, 42, 52};

// ---------------------------------------------------------------------------
// Generation records

enum class Mode { Base, U, T, UT, Selective, FullTranslation };

const char* mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

enum class FinishReason { Stop, Length, Error };

const char* finish_reason_name(FinishReason reason);
FinishReason finish_reason_from_name(const std::string& name);

// Where the final answer is read from: the response (Base, U) or the
// reasoning trace (T, UT).
enum class AnswerSource { Response, Trace };

const char* answer_source_name(AnswerSource source);
AnswerSource answer_source_for_mode(Mode mode);

struct TopkEntry {
    std::int32_t token_id = 0;
    double logprob = 0.0;
    bool operator==(const TopkEntry&) const = default;
};

// Per-step top-K rows, row-major, uniform width. Rows are sorted descending
// by probability.
struct TopkMatrix {
    std::size_t width = 0;
    std::vector<TopkEntry> entries;  // rows() * width

    std::size_t rows() const { return width == 0 ? 0 : entries.size() / width; }
    const TopkEntry& at(std::size_t row, std::size_t col) const {
        return entries[row * width + col];
    }
    bool operator==(const TopkMatrix&) const = default;
};

struct GenerationRecord {
    std::string sample_id;
    Mode mode = Mode::Base;
    std::uint64_t seed = 0;
    std::string trace;
    std::string response;
    std::int64_t trace_token_count = 0;
    std::optional<TopkMatrix> topk_logprobs;
    std::optional<std::vector<double>> prompt_token_logprobs;
    std::optional<std::vector<double>> final_hidden_state;
    FinishReason finish_reason = FinishReason::Stop;
    std::string backend_id;

    bool operator==(const GenerationRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Run manifests

struct RunManifest {
    std::string config_digest;
    std::vector<std::string> dataset_refs;
    std::vector<std::string> languages;
    std::vector<Mode> modes;
    std::vector<std::uint64_t> seeds;
    std::string backend_id;
    std::string created_at;  // ISO-8601, informational only

    json to_json() const;
    static RunManifest from_json(const json& j);
};

// Canonical JSON text: sorted keys, shortest round-trip float form. The
// digest of this form is stable across platforms and runs.
std::string canonical_json(const json& j);

}  // namespace rgap
