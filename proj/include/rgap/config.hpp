#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rgap/assets.hpp"
#include "rgap/backends.hpp"
#include "rgap/http_backend.hpp"
#include "rgap/interventions.hpp"
#include "rgap/types.hpp"

namespace rgap {

struct BackendSpec {
    std::string type;  // "scripted" | "http"
    std::string fixture;  // scripted
    HttpEndpoint endpoint;  // http
    std::optional<BackendCapabilities> capability_overrides;

    json to_json() const;
    static BackendSpec from_json(const json& j);
};

struct DatasetSpec {
    std::string path;  // JSONL sample file
    DatasetId name = DatasetId::Custom;

    json to_json() const;
    static DatasetSpec from_json(const json& j);
};

struct DetectorSpec {
    std::string type = "prober";  // prober | text-classifier | avg-confidence |
                                  // min-confidence | input-nll | random | self-reflection |
                                  // monitor | scripted
    std::string artifact;         // trained detector path (supervised types)
    std::optional<double> threshold;  // threshold detectors
    std::vector<std::string> flagged_sample_ids;  // scripted detector
    int encoder_dim = 256;        // text classifier feature width

    json to_json() const;
    static DetectorSpec from_json(const json& j);
};

// One experiment = one config file. CLI flags override scalars; overrides are
// recorded in the manifest.
struct PipelineConfig {
    BackendSpec backend;
    std::optional<BackendSpec> translator;
    std::optional<BackendSpec> judge;
    DatasetSpec dataset;
    std::optional<DatasetSpec> calibration_dataset;
    std::vector<std::string> languages;
    std::vector<Mode> modes = {Mode::Base, Mode::U, Mode::T, Mode::UT};
    std::vector<std::uint64_t> seeds = kDefaultSeeds;
    SamplingConfig sampling;
    PrefixVariant prefix_variant = PrefixVariant::Original;
    DetectorSpec detector;
    std::vector<std::optional<std::int64_t>> cutoffs = {std::nullopt};  // nullopt = full
    std::optional<std::int64_t> cutoff;  // active cutoff for signal/train/selective commands
    std::string output_dir = "out";
    std::string cache_dir;
    json instruction_assets = json::object();
    json closing_pattern_assets = json::object();
    int topk_k = 20;
    double welch_alpha = 0.05;
    bool llm_extraction_fallback = false;
    std::vector<std::string> overrides;  // CLI overrides applied, for the manifest

    static PipelineConfig load(const std::string& path);
    static PipelineConfig from_json(const json& j);
    json to_json() const;
    void validate() const;

    // Digest over the generation-relevant view (backend, sampling, variant,
    // dataset, assets); participates in cache keys.
    std::string generation_digest() const;
};

std::string cutoff_label(const std::optional<std::int64_t>& cutoff);
std::optional<std::int64_t> cutoff_from_json(const json& j);

}  // namespace rgap
