#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rgap/cache.hpp"
#include "rgap/classifiers.hpp"
#include "rgap/config.hpp"
#include "rgap/detection.hpp"
#include "rgap/extraction.hpp"
#include "rgap/labels.hpp"
#include "rgap/scripted.hpp"
#include "rgap/selective.hpp"

namespace rgap {

// Dataset roles: the evaluation set and the calibration set used for
// detector training and threshold calibration.
enum class DatasetRole { Eval, Calibration };
const char* dataset_role_name(DatasetRole role);

// Orchestrates the command DAG over one experiment config. Every command is
// idempotent given the cache and writes its artifacts under output_dir;
// downstream commands fail with an error naming the producing command when
// an upstream artifact is missing.
class Pipeline {
  public:
    explicit Pipeline(PipelineConfig config);

    // Commands (exposed to both the CLI and tests).
    void generate();
    void score();
    void attribute();
    void label();
    void signals();
    void train_detector();
    void calibrate();
    void eval_detector();
    void selective();
    void langdist();
    void quality();
    void report();

    const PipelineConfig& config() const { return config_; }
    ReasoningBackend& backend();
    const std::vector<Sample>& samples(DatasetRole role);

  private:
    std::filesystem::path out(DatasetRole role) const;
    std::filesystem::path records_file(DatasetRole role, Mode mode, std::uint64_t seed) const;
    std::filesystem::path scores_file(DatasetRole role, Mode mode) const;
    std::filesystem::path verdicts_file(DatasetRole role, Mode mode) const;
    std::filesystem::path labels_file(DatasetRole role) const;
    std::filesystem::path signals_file(DatasetRole role) const;
    std::filesystem::path detector_artifact_path() const;
    std::filesystem::path threshold_path(const std::string& kind) const;

    void ensure_backend();
    void ensure_translator();
    void ensure_judge();
    Translator* translator_or_null();
    Judge* judge_or_null();

    std::vector<Mode> modes_for(DatasetRole role) const;
    GenerationRecord run_generation(const Sample& sample, Mode mode, std::uint64_t seed,
                                    std::optional<std::int64_t> cutoff, bool with_captures);
    void generate_role(DatasetRole role);
    void score_role(DatasetRole role);
    void label_role(DatasetRole role);
    void signals_role(DatasetRole role);

    std::vector<GenerationRecord> load_mode_records(DatasetRole role, Mode mode,
                                                    const char* producer);
    AccuracyTable load_scores(DatasetRole role, Mode mode, const char* producer);
    std::vector<DetectionSignals> load_signals(DatasetRole role, const char* producer);
    std::vector<LabeledInstance> load_role_labels(DatasetRole role, const char* producer);

    ScoringOptions scoring_options();
    SelectiveContext selective_context();
    std::unique_ptr<FailureDetector> build_detector();

    PipelineConfig config_;
    std::filesystem::path out_dir_;
    std::unique_ptr<ReasoningBackend> backend_;
    std::unique_ptr<Translator> translator_;
    std::unique_ptr<Judge> judge_;
    std::unique_ptr<GenerationCache> cache_;
    std::unique_ptr<DirectoryLock> cache_lock_;
    InstructionTable instructions_;
    ClosingPatternTable closing_patterns_;
    std::optional<std::vector<Sample>> eval_samples_;
    std::optional<std::vector<Sample>> calibration_samples_;
    std::shared_ptr<ScriptedFixture> scripted_fixture_;  // shared by scripted components
};

// Writes JSON to a file with a trailing newline (dump(2) formatting).
void write_json_file(const std::filesystem::path& path, const json& j);
json read_json_file(const std::filesystem::path& path, const char* producer);

}  // namespace rgap
