#include "rgap/types.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "rgap/common.hpp"

namespace rgap {

namespace {

const std::map<std::string, ResourceTier> kTierTable = {
    {"en", ResourceTier::High}, {"de", ResourceTier::High}, {"es", ResourceTier::High},
    {"ar", ResourceTier::High}, {"ja", ResourceTier::High}, {"ko", ResourceTier::High},
    {"fr", ResourceTier::High}, {"th", ResourceTier::Mid},  {"bn", ResourceTier::Mid},
    {"sw", ResourceTier::Low},  {"te", ResourceTier::Low},  {"mr", ResourceTier::Low},
    {"wo", ResourceTier::Low},
};

bool is_lower_ascii(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::islower(c) || c == '-';
    });
}

}  // namespace

LanguageTag LanguageTag::for_code(const std::string& code) {
    LanguageTag tag;
    tag.code = code;
    auto it = kTierTable.find(code);
    tag.tier = it != kTierTable.end() ? it->second : ResourceTier::Mid;
    return tag;
}

const char* resource_tier_name(ResourceTier tier) {
    switch (tier) {
        case ResourceTier::High: return "high";
        case ResourceTier::Mid: return "mid";
        case ResourceTier::Low: return "low";
    }
    return "high";
}

ResourceTier resource_tier_from_name(const std::string& name) {
    if (name == "high") return ResourceTier::High;
    if (name == "mid") return ResourceTier::Mid;
    if (name == "low") return ResourceTier::Low;
    fail(ErrorKind::Schema, "unknown resource tier: " + name);
}

const char* dataset_name(DatasetId id) {
    switch (id) {
        case DatasetId::PolymathLow: return "polymath-low";
        case DatasetId::PolymathMedium: return "polymath-medium";
        case DatasetId::PolymathHigh: return "polymath-high";
        case DatasetId::MmluProxLite: return "mmluprox-lite";
        case DatasetId::MgsmCal: return "mgsm-cal";
        case DatasetId::MmluProxVal: return "mmluprox-val";
        case DatasetId::Custom: return "custom";
    }
    return "custom";
}

DatasetId dataset_from_name(const std::string& name) {
    static const std::map<std::string, DatasetId> table = {
        {"polymath-low", DatasetId::PolymathLow},
        {"polymath-medium", DatasetId::PolymathMedium},
        {"polymath-high", DatasetId::PolymathHigh},
        {"mmluprox-lite", DatasetId::MmluProxLite},
        {"mgsm-cal", DatasetId::MgsmCal},
        {"mmluprox-val", DatasetId::MmluProxVal},
        {"custom", DatasetId::Custom},
    };
    auto it = table.find(name);
    if (it == table.end()) fail(ErrorKind::Schema, "unknown dataset: " + name);
    return it->second;
}

const char* answer_type_name(AnswerType type) {
    return type == AnswerType::MathExpression ? "math-expression" : "choice-letter";
}

AnswerType answer_type_from_name(const std::string& name) {
    if (name == "math-expression") return AnswerType::MathExpression;
    if (name == "choice-letter") return AnswerType::ChoiceLetter;
    fail(ErrorKind::Schema, "unknown answer type: " + name);
}

const char* mode_name(Mode mode) {
    switch (mode) {
        case Mode::Base: return "base";
        case Mode::U: return "U";
        case Mode::T: return "T";
        case Mode::UT: return "UT";
        case Mode::Selective: return "selective";
        case Mode::FullTranslation: return "full-translation";
    }
    return "base";
}

Mode mode_from_name(const std::string& name) {
    static const std::map<std::string, Mode> table = {
        {"base", Mode::Base},          {"U", Mode::U},
        {"T", Mode::T},                {"UT", Mode::UT},
        {"selective", Mode::Selective}, {"full-translation", Mode::FullTranslation},
    };
    auto it = table.find(name);
    if (it == table.end()) fail(ErrorKind::Schema, "unknown mode: " + name);
    return it->second;
}

const char* finish_reason_name(FinishReason reason) {
    switch (reason) {
        case FinishReason::Stop: return "stop";
        case FinishReason::Length: return "length";
        case FinishReason::Error: return "error";
    }
    return "stop";
}

FinishReason finish_reason_from_name(const std::string& name) {
    if (name == "stop") return FinishReason::Stop;
    if (name == "length") return FinishReason::Length;
    if (name == "error") return FinishReason::Error;
    fail(ErrorKind::Schema, "unknown finish reason: " + name);
}

void Sample::validate() const {
    if (id.empty()) fail(ErrorKind::Schema, "sample field 'id' must be non-empty");
    if (language.code.empty() || !is_lower_ascii(language.code))
        fail(ErrorKind::Schema, "sample field 'language' must be a lowercase code (sample " + id + ")");
    if (question.empty()) fail(ErrorKind::Schema, "sample field 'question' must be non-empty (sample " + id + ")");
    if (options.size() > 10)
        fail(ErrorKind::Schema, "sample field 'options' holds more than 10 entries (sample " + id + ")");
    if (answer_type == AnswerType::ChoiceLetter) {
        if (options.empty())
            fail(ErrorKind::Schema, "sample field 'options' must be non-empty for choice-letter (sample " + id + ")");
        if (gold.size() != 1 || gold[0] < 'A' || gold[0] > 'J')
            fail(ErrorKind::Schema, "sample field 'gold' must be a letter A..J for choice-letter (sample " + id + ")");
    }
}

json sample_to_json(const Sample& sample) {
    json j;
    j["id"] = sample.id;
    j["dataset"] = dataset_name(sample.dataset);
    j["language"] = sample.language.code;
    j["tier"] = resource_tier_name(sample.language.tier);
    j["question"] = sample.question;
    j["x_dom"] = sample.x_dom;
    j["options"] = sample.options;
    j["gold"] = sample.gold;
    j["answer_type"] = answer_type_name(sample.answer_type);
    if (!sample.subject.empty()) j["subject"] = sample.subject;
    return j;
}

Sample sample_from_json(const json& j) {
    auto require = [&](const char* field) -> const json& {
        auto it = j.find(field);
        if (it == j.end()) fail(ErrorKind::Schema, std::string("sample missing field '") + field + "'");
        return *it;
    };
    Sample s;
    s.id = require("id").get<std::string>();
    s.dataset = dataset_from_name(require("dataset").get<std::string>());
    s.language = LanguageTag::for_code(require("language").get<std::string>());
    if (j.contains("tier")) s.language.tier = resource_tier_from_name(j.at("tier").get<std::string>());
    s.question = require("question").get<std::string>();
    s.x_dom = j.value("x_dom", std::string());
    if (j.contains("options")) s.options = j.at("options").get<std::vector<std::string>>();
    s.gold = require("gold").get<std::string>();
    s.answer_type = answer_type_from_name(require("answer_type").get<std::string>());
    s.subject = j.value("subject", std::string());
    s.validate();
    return s;
}

std::vector<Sample> load_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open sample file: " + path);
    std::vector<Sample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            fail(ErrorKind::Schema, path + ":" + std::to_string(line_no) + ": invalid JSON");
        samples.push_back(sample_from_json(j));
    }
    return samples;
}

void save_samples(const std::string& path, const std::vector<Sample>& samples) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Config, "cannot write sample file: " + path);
    for (const auto& s : samples) out << canonical_json(sample_to_json(s)) << "\n";
}

json SamplingConfig::to_json() const {
    json j;
    j["temperature"] = temperature;
    j["top_p"] = top_p;
    j["top_k"] = top_k;
    j["max_new_tokens"] = max_new_tokens;
    j["seed"] = seed;
    return j;
}

SamplingConfig SamplingConfig::from_json(const json& j) {
    SamplingConfig c;
    c.temperature = j.value("temperature", c.temperature);
    c.top_p = j.value("top_p", c.top_p);
    c.top_k = j.value("top_k", c.top_k);
    c.max_new_tokens = j.value("max_new_tokens", c.max_new_tokens);
    c.seed = j.value("seed", c.seed);
    return c;
}

json RunManifest::to_json() const {
    json j;
    j["config_digest"] = config_digest;
    j["dataset_refs"] = dataset_refs;
    j["languages"] = languages;
    json modes_j = json::array();
    for (Mode m : modes) modes_j.push_back(mode_name(m));
    j["modes"] = modes_j;
    j["seeds"] = seeds;
    j["backend_id"] = backend_id;
    j["created_at"] = created_at;
    return j;
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    m.config_digest = j.at("config_digest").get<std::string>();
    m.dataset_refs = j.at("dataset_refs").get<std::vector<std::string>>();
    m.languages = j.at("languages").get<std::vector<std::string>>();
    for (const auto& name : j.at("modes")) m.modes.push_back(mode_from_name(name.get<std::string>()));
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.backend_id = j.at("backend_id").get<std::string>();
    m.created_at = j.value("created_at", std::string());
    return m;
}

std::string canonical_json(const json& j) {
    // nlohmann::json objects iterate in sorted key order and serialize doubles
    // with the shortest round-trip decimal form, so dump() is already canonical.
    return j.dump();
}

}  // namespace rgap
