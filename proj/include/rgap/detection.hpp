#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rgap/backends.hpp"
#include "rgap/labels.hpp"
#include "rgap/types.hpp"

namespace rgap {

// ---------------------------------------------------------------------------
// Signals

struct ConfidenceSeries {
    std::vector<double> series;  // c_t per generated trace position
    double avg = 0.0;
    double min = 0.0;
};

// Per-step confidence: negative log-probability averaged over the top-K'
// entries of each row, K' = min(k, row width). Probabilities are floored at
// 1e-12 before the log. Throws a no-signal error on an empty trace.
ConfidenceSeries token_confidence(const TopkMatrix& topk, int k = 20);

// Mean negative log-probability over the scored prompt tokens.
double input_nll(const std::vector<double>& prompt_token_logprobs);

struct DetectionSignals {
    std::string sample_id;
    std::string language;
    std::uint64_t seed = 0;
    double avg_conf = 0.0;
    double min_conf = 0.0;
    double input_nll = 0.0;
    std::vector<double> hidden;
    std::string trace_text;
    std::optional<std::int64_t> trace_cutoff;  // nullopt = full trace
};

// Pulls the detector inputs out of one generation record. The record must
// carry the captures the signals need (topk, prompt logprobs, hidden state).
DetectionSignals extract_signals(const GenerationRecord& record, const std::string& language,
                                 int k = 20, std::optional<std::int64_t> cutoff = std::nullopt);

// ---------------------------------------------------------------------------
// Self-assessment

struct ReflectionVerdict {
    int prediction = 0;  // 1 = not understood
    bool parse_failed = false;
};

// Strips the end-of-think marker, appends the fixed reflection instruction,
// continues deterministically and parses the first YES/NO after the
// <Understandability>: tag (YES -> 0, NO -> 1, unparseable -> 0 flagged).
ReflectionVerdict self_reflect(ReasoningBackend& backend, const Sample& sample,
                               const std::string& trace);

// ---------------------------------------------------------------------------
// Threshold calibration

enum class ScoreDirection { LowIndicatesFailure, HighIndicatesFailure };

const char* score_direction_name(ScoreDirection direction);
ScoreDirection score_direction_from_name(const std::string& name);

inline int classify_with_threshold(double score, double threshold, ScoreDirection direction) {
    return direction == ScoreDirection::LowIndicatesFailure ? (score <= threshold ? 1 : 0)
                                                            : (score >= threshold ? 1 : 0);
}

struct ThresholdResult {
    double threshold = 0.0;
    double f1 = 0.0;        // calibration F1 at the chosen threshold, percent
    bool degenerate = false;
};

// Chooses the threshold maximizing F1 on the calibration data from the
// midpoints between sorted distinct scores plus the +-infinity sentinels.
// F1 ties break toward the threshold flagging fewer positives.
ThresholdResult calibrate_threshold(const std::vector<double>& scores,
                                    const std::vector<int>& labels, ScoreDirection direction);

// ---------------------------------------------------------------------------
// Random baseline

// Predicts "not understood" with the per-language positive proportion seen in
// calibration. Predictions are a pure function of (seed, language, sample_id).
class RandomBaseline {
  public:
    RandomBaseline(std::map<std::string, double> p_by_language, double global_p,
                   std::uint64_t seed);

    static RandomBaseline from_calibration(const std::vector<LabeledInstance>& calibration,
                                           std::uint64_t seed);

    int predict(const std::string& language, const std::string& sample_id) const;
    double proportion_for(const std::string& language) const;

  private:
    std::map<std::string, double> p_by_language_;
    double global_p_ = 0.0;
    std::uint64_t seed_ = 0;
    mutable std::set<std::string> warned_;
};

// ---------------------------------------------------------------------------
// Metrics

struct EvalInstance {
    std::string language;
    std::uint64_t seed = 0;
    int label = 0;       // 0/1; excluded instances are removed upstream
    int prediction = 0;  // 1 = not understood
    std::optional<double> score;
};

struct MetricSummary {
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> per_seed;
};

struct DetectorReport {
    std::string detector_name;
    MetricSummary balanced_accuracy;            // percent
    MetricSummary f1;                           // percent
    std::optional<MetricSummary> pr_auc;        // percent; absent for non-scoring detectors
    std::map<std::string, MetricSummary> per_language_f1;
    std::optional<double> threshold;            // threshold detectors only

    json to_json() const;
};

// Area under the precision-recall curve (positive class 1), in percent,
// using step-wise integration over the distinct-score thresholds. Scores
// must be oriented so that higher means more likely positive.
double pr_auc_percent(const std::vector<int>& labels, const std::vector<double>& scores);

double balanced_accuracy_percent(const std::vector<int>& labels,
                                 const std::vector<int>& predictions);
double f1_percent(const std::vector<int>& labels, const std::vector<int>& predictions);

// Pools instances across languages per seed, reports mean +- sd over seeds,
// and adds the per-language F1 breakdown. PR-AUC is computed only when
// `direction` is set and every instance carries a score.
DetectorReport evaluate_detector(const std::vector<EvalInstance>& instances,
                                 std::optional<ScoreDirection> direction,
                                 const std::string& detector_name);

}  // namespace rgap
