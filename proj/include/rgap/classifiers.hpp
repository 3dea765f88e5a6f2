#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "rgap/detection.hpp"
#include "rgap/mlp.hpp"

namespace rgap {

// ---------------------------------------------------------------------------
// Text encoding

// Frozen feature extractor for the trace classifier. Real deployments bind a
// multilingual pretrained encoder here; tests use the hashed-ngram encoder.
class TextEncoder {
  public:
    virtual ~TextEncoder() = default;
    virtual std::string id() const = 0;
    virtual int dim() const = 0;
    virtual std::size_t max_chars() const = 0;
    virtual std::vector<double> encode(const std::string& text) const = 0;
};

// Hashed bag-of-words embedding, L2-normalized. Deterministic and
// language-agnostic; adequate for separable fixtures and smoke runs.
class HashedNgramEncoder : public TextEncoder {
  public:
    explicit HashedNgramEncoder(int dim = 256, std::size_t max_chars = 8192);

    std::string id() const override;
    int dim() const override { return dim_; }
    std::size_t max_chars() const override { return max_chars_; }
    std::vector<double> encode(const std::string& text) const override;

  private:
    int dim_;
    std::size_t max_chars_;
};

// Classifier input: question ++ separator ++ trace, truncated from the trace
// tail to the encoder limit (flagged via a warning when truncation happens).
std::string build_classifier_input(const std::string& question, const std::string& trace,
                                   std::size_t max_chars);

// ---------------------------------------------------------------------------
// Trained detector artifacts

struct TrainedDetector {
    std::string type;  // "text-classifier" | "prober"
    MlpClassifier model;
    json hyperparameters;
    std::optional<double> threshold;  // probability threshold; 0.5 default
    std::string training_data_digest;
    std::string encoder_id;  // text classifier only
    double best_val_f1 = 0.0;

    double probability(const std::vector<double>& features,
                       ParallelMode mode = ParallelMode::Serial) const;
    int predict(const std::vector<double>& features,
                ParallelMode mode = ParallelMode::Serial) const;

    void save(const std::string& path) const;  // JSON artifact with manifest
    static TrainedDetector load(const std::string& path);
};

// ---------------------------------------------------------------------------
// Training entry points

struct TextInstance {
    std::string question;
    std::string trace;
    int label = 0;
};

struct TextClassifierHp {
    int max_epochs = 30;
    int batch_size = 8;
    double learning_rate = 3e-5;
    double validation_fraction = 0.1;
    int patience = 5;
    int hidden_dim = 0;  // binary head on top of the frozen encoder
    std::uint64_t seed = 0;
};

// Binary head over the frozen encoder, trained with inverse-frequency
// weighted cross-entropy, per-epoch validation and best-F1 checkpointing.
TrainedDetector train_text_classifier(const std::vector<TextInstance>& data,
                                      const TextEncoder& encoder, const TextClassifierHp& hp,
                                      ParallelMode mode = ParallelMode::Serial);

struct VectorInstance {
    std::vector<double> features;
    int label = 0;
};

struct ProberHp {
    int max_epochs = 50;
    int batch_size = 16;
    double validation_fraction = 0.1;
    int patience = 5;
    std::uint64_t seed = 0;
};

// Grid search over learning rates {1e-3, 1e-4, 1e-5} and hidden sizes
// {0, 32, 128, 512, d/2, d} (18 configurations); returns the best
// validation-F1 configuration. Configurations train independently, so the
// grid parallelizes without affecting results.
std::vector<MlpTrainConfig> prober_grid(int input_dim, const ProberHp& hp);
TrainedDetector train_prober(const std::vector<VectorInstance>& data, const ProberHp& hp,
                             ParallelMode mode = ParallelMode::Serial);

// ---------------------------------------------------------------------------
// Detector handles

// Uniform interface the selective-translation pipeline consumes: flag a
// sample for translation from its detection signals.
class FailureDetector {
  public:
    virtual ~FailureDetector() = default;
    virtual std::string name() const = 0;
    virtual int flag(const DetectionSignals& signals) const = 0;  // 1 = translate
    virtual std::optional<double> score(const DetectionSignals& /*signals*/) const {
        return std::nullopt;
    }
};

class ProberDetector : public FailureDetector {
  public:
    explicit ProberDetector(TrainedDetector detector);
    std::string name() const override { return "prober"; }
    int flag(const DetectionSignals& signals) const override;
    std::optional<double> score(const DetectionSignals& signals) const override;

  private:
    TrainedDetector detector_;
};

class TextClassifierDetector : public FailureDetector {
  public:
    TextClassifierDetector(TrainedDetector detector, std::shared_ptr<const TextEncoder> encoder,
                           std::map<std::string, std::string> questions_by_sample);
    std::string name() const override { return "text-classifier"; }
    int flag(const DetectionSignals& signals) const override;
    std::optional<double> score(const DetectionSignals& signals) const override;

  private:
    TrainedDetector detector_;
    std::shared_ptr<const TextEncoder> encoder_;
    std::map<std::string, std::string> questions_by_sample_;
};

enum class SignalKind { AvgConf, MinConf, InputNll };

const char* signal_kind_name(SignalKind kind);
SignalKind signal_kind_from_name(const std::string& name);
double signal_value(const DetectionSignals& signals, SignalKind kind);
ScoreDirection signal_direction(SignalKind kind);  // confidences: low = failure

// Calibrated-threshold detector over one scalar signal.
class ThresholdDetector : public FailureDetector {
  public:
    ThresholdDetector(SignalKind kind, double threshold);
    std::string name() const override;
    int flag(const DetectionSignals& signals) const override;
    std::optional<double> score(const DetectionSignals& signals) const override;

    SignalKind kind() const { return kind_; }
    double threshold() const { return threshold_; }

  private:
    SignalKind kind_;
    double threshold_;
};

// Flags exactly the listed sample ids; test/pipeline double.
class ScriptedDetector : public FailureDetector {
  public:
    explicit ScriptedDetector(std::set<std::string> flagged);
    std::string name() const override { return "scripted"; }
    int flag(const DetectionSignals& signals) const override;

  private:
    std::set<std::string> flagged_;
};

}  // namespace rgap
