#include "rgap/config.hpp"

#include <fstream>

#include "rgap/common.hpp"
#include "rgap/digest.hpp"

namespace rgap {

json BackendSpec::to_json() const {
    json j;
    j["type"] = type;
    if (!fixture.empty()) j["fixture"] = fixture;
    if (type == "http") j["endpoint"] = endpoint.to_json();
    if (capability_overrides) j["capabilities"] = capability_overrides->to_json();
    return j;
}

BackendSpec BackendSpec::from_json(const json& j) {
    BackendSpec s;
    s.type = j.at("type").get<std::string>();
    s.fixture = j.value("fixture", std::string());
    if (j.contains("endpoint")) s.endpoint = HttpEndpoint::from_json(j.at("endpoint"));
    if (j.contains("capabilities"))
        s.capability_overrides = BackendCapabilities::from_json(j.at("capabilities"));
    if (s.type != "scripted" && s.type != "http")
        fail(ErrorKind::Config, "backend type must be 'scripted' or 'http', got '" + s.type + "'");
    if (s.type == "scripted" && s.fixture.empty())
        fail(ErrorKind::Config, "scripted backend requires a 'fixture' path");
    if (s.type == "http" && s.endpoint.base_url.empty())
        fail(ErrorKind::Config, "http backend requires an endpoint base_url");
    return s;
}

json DatasetSpec::to_json() const {
    json j;
    j["path"] = path;
    j["name"] = dataset_name(name);
    return j;
}

DatasetSpec DatasetSpec::from_json(const json& j) {
    DatasetSpec s;
    s.path = j.at("path").get<std::string>();
    s.name = dataset_from_name(j.value("name", std::string("custom")));
    return s;
}

json DetectorSpec::to_json() const {
    json j;
    j["type"] = type;
    if (!artifact.empty()) j["artifact"] = artifact;
    if (threshold) j["threshold"] = *threshold;
    if (!flagged_sample_ids.empty()) j["flagged_sample_ids"] = flagged_sample_ids;
    j["encoder_dim"] = encoder_dim;
    return j;
}

DetectorSpec DetectorSpec::from_json(const json& j) {
    DetectorSpec s;
    s.type = j.value("type", s.type);
    s.artifact = j.value("artifact", std::string());
    if (j.contains("threshold")) s.threshold = j.at("threshold").get<double>();
    if (j.contains("flagged_sample_ids"))
        s.flagged_sample_ids = j.at("flagged_sample_ids").get<std::vector<std::string>>();
    s.encoder_dim = j.value("encoder_dim", s.encoder_dim);
    return s;
}

std::string cutoff_label(const std::optional<std::int64_t>& cutoff) {
    return cutoff ? std::to_string(*cutoff) : "full";
}

std::optional<std::int64_t> cutoff_from_json(const json& j) {
    if (j.is_null() || (j.is_string() && j.get<std::string>() == "full")) return std::nullopt;
    if (j.is_number_integer()) return j.get<std::int64_t>();
    fail(ErrorKind::Config, "cutoff must be an integer or \"full\"");
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open config file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::Config, "invalid config JSON: " + path);
    return from_json(j);
}

PipelineConfig PipelineConfig::from_json(const json& j) {
    PipelineConfig c;
    c.backend = BackendSpec::from_json(j.at("backend"));
    if (j.contains("translator")) c.translator = BackendSpec::from_json(j.at("translator"));
    if (j.contains("judge")) c.judge = BackendSpec::from_json(j.at("judge"));
    c.dataset = DatasetSpec::from_json(j.at("dataset"));
    if (j.contains("calibration_dataset"))
        c.calibration_dataset = DatasetSpec::from_json(j.at("calibration_dataset"));
    if (j.contains("languages"))
        c.languages = j.at("languages").get<std::vector<std::string>>();
    if (j.contains("modes")) {
        c.modes.clear();
        for (const auto& m : j.at("modes")) c.modes.push_back(mode_from_name(m.get<std::string>()));
    }
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("sampling")) c.sampling = SamplingConfig::from_json(j.at("sampling"));
    if (j.contains("prefix_variant"))
        c.prefix_variant = prefix_variant_from_name(j.at("prefix_variant").get<std::string>());
    if (j.contains("detector")) c.detector = DetectorSpec::from_json(j.at("detector"));
    if (j.contains("cutoffs")) {
        c.cutoffs.clear();
        for (const auto& entry : j.at("cutoffs")) c.cutoffs.push_back(cutoff_from_json(entry));
    }
    if (j.contains("cutoff")) c.cutoff = cutoff_from_json(j.at("cutoff"));
    c.output_dir = j.value("output_dir", c.output_dir);
    c.cache_dir = j.value("cache_dir", std::string());
    if (j.contains("assets")) {
        const auto& assets_j = j.at("assets");
        if (assets_j.contains("instructions")) c.instruction_assets = assets_j.at("instructions");
        if (assets_j.contains("closing_patterns"))
            c.closing_pattern_assets = assets_j.at("closing_patterns");
    }
    c.topk_k = j.value("topk_k", c.topk_k);
    c.welch_alpha = j.value("welch_alpha", c.welch_alpha);
    c.llm_extraction_fallback = j.value("llm_extraction_fallback", false);
    c.validate();
    return c;
}

json PipelineConfig::to_json() const {
    json j;
    j["backend"] = backend.to_json();
    if (translator) j["translator"] = translator->to_json();
    if (judge) j["judge"] = judge->to_json();
    j["dataset"] = dataset.to_json();
    if (calibration_dataset) j["calibration_dataset"] = calibration_dataset->to_json();
    j["languages"] = languages;
    json modes_j = json::array();
    for (Mode m : modes) modes_j.push_back(mode_name(m));
    j["modes"] = modes_j;
    j["seeds"] = seeds;
    j["sampling"] = sampling.to_json();
    j["prefix_variant"] = prefix_variant_name(prefix_variant);
    j["detector"] = detector.to_json();
    json cutoffs_j = json::array();
    for (const auto& entry : cutoffs)
        cutoffs_j.push_back(entry ? json(*entry) : json("full"));
    j["cutoffs"] = cutoffs_j;
    j["cutoff"] = cutoff ? json(*cutoff) : json("full");
    j["output_dir"] = output_dir;
    if (!cache_dir.empty()) j["cache_dir"] = cache_dir;
    j["assets"] = {{"instructions", instruction_assets},
                   {"closing_patterns", closing_pattern_assets}};
    j["topk_k"] = topk_k;
    j["welch_alpha"] = welch_alpha;
    j["llm_extraction_fallback"] = llm_extraction_fallback;
    return j;
}

void PipelineConfig::validate() const {
    if (dataset.path.empty()) fail(ErrorKind::Config, "dataset.path must be set");
    if (seeds.empty()) fail(ErrorKind::Config, "at least one seed is required");
    if (modes.empty()) fail(ErrorKind::Config, "at least one mode is required");
    if (output_dir.empty()) fail(ErrorKind::Config, "output_dir must be set");
    if (topk_k <= 0) fail(ErrorKind::Config, "topk_k must be positive");
    if (welch_alpha <= 0.0 || welch_alpha >= 1.0)
        fail(ErrorKind::Config, "welch_alpha must lie in (0,1)");
    for (const auto& c : cutoffs)
        if (c && *c <= 0) fail(ErrorKind::Config, "cutoffs must be positive integers or \"full\"");
    if (cutoff && *cutoff <= 0) fail(ErrorKind::Config, "cutoff must be positive or \"full\"");
}

std::string PipelineConfig::generation_digest() const {
    json view;
    view["backend"] = backend.to_json();
    view["sampling"] = sampling.to_json();
    view["prefix_variant"] = prefix_variant_name(prefix_variant);
    view["dataset"] = dataset.to_json();
    view["instructions"] = instruction_assets;
    return sha256_hex(canonical_json(view));
}

}  // namespace rgap
