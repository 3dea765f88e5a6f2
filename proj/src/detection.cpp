#include "rgap/detection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "rgap/assets.hpp"
#include "rgap/common.hpp"
#include "rgap/digest.hpp"
#include "rgap/stats.hpp"

namespace rgap {

ConfidenceSeries token_confidence(const TopkMatrix& topk, int k) {
    if (topk.rows() == 0) fail(ErrorKind::Metric, "no trace positions: confidence has no signal");
    if (topk.width == 0) fail(ErrorKind::Precondition, "topk rows must hold at least one entry");

    constexpr double kEps = 1e-12;
    const double log_floor = std::log(kEps);

    ConfidenceSeries out;
    out.series.resize(topk.rows());
    std::size_t k_eff = std::min<std::size_t>(static_cast<std::size_t>(k), topk.width);
    for (std::size_t t = 0; t < topk.rows(); ++t) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k_eff; ++j)
            sum += std::max(topk.at(t, j).logprob, log_floor);
        out.series[t] = -sum / static_cast<double>(k_eff);
    }
    out.avg = mean_of(out.series);
    out.min = *std::min_element(out.series.begin(), out.series.end());
    return out;
}

double input_nll(const std::vector<double>& prompt_token_logprobs) {
    if (prompt_token_logprobs.empty())
        fail(ErrorKind::Precondition, "input NLL requires at least one scored prompt token");
    double nll = -mean_of(prompt_token_logprobs);
    // Log-probabilities are non-positive; -0.0 normalizes to 0.0.
    return nll == 0.0 ? 0.0 : nll;
}

DetectionSignals extract_signals(const GenerationRecord& record, const std::string& language,
                                 int k, std::optional<std::int64_t> cutoff) {
    if (!record.topk_logprobs)
        fail(ErrorKind::Precondition, "record " + record.sample_id + " lacks topk capture");
    if (!record.prompt_token_logprobs)
        fail(ErrorKind::Precondition, "record " + record.sample_id + " lacks prompt logprobs");
    if (!record.final_hidden_state)
        fail(ErrorKind::Precondition, "record " + record.sample_id + " lacks hidden state");

    DetectionSignals s;
    s.sample_id = record.sample_id;
    s.language = language;
    s.seed = record.seed;
    s.trace_text = record.trace;
    s.trace_cutoff = cutoff;

    TopkMatrix topk = *record.topk_logprobs;
    if (cutoff && static_cast<std::int64_t>(topk.rows()) > *cutoff)
        topk.entries.resize(static_cast<std::size_t>(*cutoff) * topk.width);

    ConfidenceSeries conf = token_confidence(topk, k);
    s.avg_conf = conf.avg;
    s.min_conf = conf.min;
    if (s.min_conf > s.avg_conf + 1e-12)
        fail(ErrorKind::Metric, "confidence invariant violated: min > mean");
    s.input_nll = input_nll(*record.prompt_token_logprobs);
    if (s.input_nll < -1e-9)
        fail(ErrorKind::Schema, "positive prompt log-probabilities in record " + record.sample_id);
    s.hidden = *record.final_hidden_state;
    return s;
}

// ---------------------------------------------------------------------------
// Self-assessment

ReflectionVerdict self_reflect(ReasoningBackend& backend, const Sample& sample,
                               const std::string& trace) {
    if (trace.empty()) fail(ErrorKind::Precondition, "self-reflection requires a trace");

    const std::string& marker = backend.capabilities().end_of_think_marker;
    std::string stripped = trace;
    if (auto pos = stripped.rfind(marker); pos != std::string::npos)
        stripped.erase(pos);

    std::string combined = stripped;
    if (!combined.empty() && combined.back() != '\n') combined += "\n";
    combined += assets::kSelfReflectionInstruction;

    SamplingConfig deterministic;
    deterministic.temperature = 0.0;
    std::string full = backend.continue_trace(sample, combined, deterministic);

    static const std::string tag = "<Understandability>:";
    auto tag_pos = full.rfind(tag);
    ReflectionVerdict verdict;
    if (tag_pos == std::string::npos) {
        verdict.parse_failed = true;
        return verdict;
    }
    std::string tail = full.substr(tag_pos + tag.size());
    std::string upper;
    upper.reserve(tail.size());
    for (char c : tail) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    auto yes = upper.find("YES");
    auto no = upper.find("NO");
    if (yes == std::string::npos && no == std::string::npos) {
        verdict.parse_failed = true;  // defaults to understood (0)
        return verdict;
    }
    verdict.prediction = (no != std::string::npos && (yes == std::string::npos || no < yes)) ? 1 : 0;
    return verdict;
}

// ---------------------------------------------------------------------------
// Threshold calibration

const char* score_direction_name(ScoreDirection direction) {
    return direction == ScoreDirection::LowIndicatesFailure ? "low-indicates-failure"
                                                            : "high-indicates-failure";
}

ScoreDirection score_direction_from_name(const std::string& name) {
    if (name == "low-indicates-failure") return ScoreDirection::LowIndicatesFailure;
    if (name == "high-indicates-failure") return ScoreDirection::HighIndicatesFailure;
    fail(ErrorKind::Schema, "unknown score direction: " + name);
}

namespace {

struct F1Counts {
    int tp = 0, fp = 0, fn = 0;
    double f1() const {
        double denom = 2.0 * tp + fp + fn;
        return denom == 0.0 ? 0.0 : 100.0 * 2.0 * tp / denom;
    }
    int flagged() const { return tp + fp; }
};

F1Counts f1_counts(const std::vector<int>& labels, const std::vector<int>& predictions) {
    F1Counts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (predictions[i] == 1 && labels[i] == 1) ++c.tp;
        else if (predictions[i] == 1) ++c.fp;
        else if (labels[i] == 1) ++c.fn;
    }
    return c;
}

}  // namespace

ThresholdResult calibrate_threshold(const std::vector<double>& scores,
                                    const std::vector<int>& labels, ScoreDirection direction) {
    if (scores.size() != labels.size() || scores.empty())
        fail(ErrorKind::Precondition, "calibration needs matching non-empty scores and labels");
    for (double s : scores)
        if (!std::isfinite(s)) fail(ErrorKind::Precondition, "calibration scores must be finite");

    std::vector<double> distinct = scores;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<double> candidates;
    candidates.push_back(-std::numeric_limits<double>::infinity());
    for (std::size_t i = 1; i < distinct.size(); ++i)
        candidates.push_back(0.5 * (distinct[i - 1] + distinct[i]));
    candidates.push_back(std::numeric_limits<double>::infinity());

    ThresholdResult best;
    best.threshold = candidates.front();
    double best_f1 = -1.0;
    int best_flagged = std::numeric_limits<int>::max();
    std::vector<int> predictions(scores.size());
    for (double candidate : candidates) {
        for (std::size_t i = 0; i < scores.size(); ++i)
            predictions[i] = classify_with_threshold(scores[i], candidate, direction);
        F1Counts counts = f1_counts(labels, predictions);
        double f1 = counts.f1();
        if (f1 > best_f1 || (f1 == best_f1 && counts.flagged() < best_flagged)) {
            best_f1 = f1;
            best_flagged = counts.flagged();
            best.threshold = candidate;
        }
    }
    best.f1 = best_f1;
    if (distinct.size() == 1) {
        best.degenerate = true;
        warn("degenerate calibration: all scores identical");
    }
    return best;
}

// ---------------------------------------------------------------------------
// Random baseline

RandomBaseline::RandomBaseline(std::map<std::string, double> p_by_language, double global_p,
                               std::uint64_t seed)
    : p_by_language_(std::move(p_by_language)), global_p_(global_p), seed_(seed) {}

RandomBaseline RandomBaseline::from_calibration(const std::vector<LabeledInstance>& calibration,
                                                std::uint64_t seed) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // (positives, labeled)
    std::size_t global_pos = 0, global_n = 0;
    for (const auto& li : calibration) {
        if (li.label == FailureLabel::Excluded) continue;
        auto& [pos, n] = counts[li.language];
        ++n;
        ++global_n;
        if (li.label == FailureLabel::NotUnderstood) {
            ++pos;
            ++global_pos;
        }
    }
    std::map<std::string, double> p;
    for (const auto& [language, c] : counts)
        p[language] = c.second == 0 ? 0.0 : static_cast<double>(c.first) / c.second;
    double global_p = global_n == 0 ? 0.0 : static_cast<double>(global_pos) / global_n;
    return RandomBaseline(std::move(p), global_p, seed);
}

double RandomBaseline::proportion_for(const std::string& language) const {
    auto it = p_by_language_.find(language);
    if (it != p_by_language_.end()) return it->second;
    if (warned_.insert(language).second)
        warn("random baseline: language '" + language + "' absent from calibration; using the "
             "global proportion");
    return global_p_;
}

int RandomBaseline::predict(const std::string& language, const std::string& sample_id) const {
    double p = proportion_for(language);
    std::uint64_t h = fnv1a64(std::to_string(seed_) + "|" + language + "|" + sample_id);
    double u = static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
    return u < p ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Metrics

double balanced_accuracy_percent(const std::vector<int>& labels,
                                 const std::vector<int>& predictions) {
    int tp = 0, tn = 0, pos = 0, neg = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) {
            ++pos;
            if (predictions[i] == 1) ++tp;
        } else {
            ++neg;
            if (predictions[i] == 0) ++tn;
        }
    }
    if (pos == 0 || neg == 0)
        fail(ErrorKind::Metric, "balanced accuracy undefined: single-class label set");
    double tpr = static_cast<double>(tp) / pos;
    double tnr = static_cast<double>(tn) / neg;
    return 100.0 * 0.5 * (tpr + tnr);
}

double f1_percent(const std::vector<int>& labels, const std::vector<int>& predictions) {
    return f1_counts(labels, predictions).f1();
}

double pr_auc_percent(const std::vector<int>& labels, const std::vector<double>& scores) {
    if (labels.size() != scores.size() || labels.empty())
        fail(ErrorKind::Precondition, "PR-AUC needs matching non-empty labels and scores");
    int total_pos = 0;
    for (int y : labels) total_pos += y;
    if (total_pos == 0) fail(ErrorKind::Metric, "PR-AUC undefined: no positive labels");

    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double auc = 0.0;
    double prev_recall = 0.0;
    int tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            if (labels[order[j]] == 1) ++tp;
            else ++fp;
            ++j;
        }
        double recall = static_cast<double>(tp) / total_pos;
        double precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
        auc += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return 100.0 * auc;
}

namespace {

MetricSummary summarize(std::vector<double> per_seed) {
    MetricSummary s;
    s.mean = mean_of(per_seed);
    s.sd = sample_sd(per_seed);
    s.per_seed = std::move(per_seed);
    return s;
}

json summary_to_json(const MetricSummary& s) {
    json j;
    j["mean"] = s.mean;
    j["sd"] = s.sd;
    j["per_seed"] = s.per_seed;
    return j;
}

}  // namespace

json DetectorReport::to_json() const {
    json j;
    j["detector"] = detector_name;
    j["balanced_accuracy"] = summary_to_json(balanced_accuracy);
    j["f1"] = summary_to_json(f1);
    j["pr_auc"] = pr_auc ? summary_to_json(*pr_auc) : json(nullptr);
    json per_language = json::object();
    for (const auto& [language, summary] : per_language_f1)
        per_language[language] = summary_to_json(summary);
    j["per_language_f1"] = per_language;
    if (threshold) {
        if (std::isinf(*threshold))
            j["threshold"] = *threshold > 0 ? "Infinity" : "-Infinity";
        else
            j["threshold"] = *threshold;
    }
    return j;
}

DetectorReport evaluate_detector(const std::vector<EvalInstance>& instances,
                                 std::optional<ScoreDirection> direction,
                                 const std::string& detector_name) {
    if (instances.empty()) fail(ErrorKind::Precondition, "no instances to evaluate");
    for (const auto& inst : instances)
        if (inst.label != 0 && inst.label != 1)
            fail(ErrorKind::Precondition, "excluded instances must be removed before evaluation");

    std::set<std::uint64_t> seed_set;
    for (const auto& inst : instances) seed_set.insert(inst.seed);

    bool scoring = direction.has_value();
    if (scoring)
        for (const auto& inst : instances)
            if (!inst.score) fail(ErrorKind::Precondition, "scoring detector lacks a score");

    std::vector<double> bal_per_seed, f1_per_seed, auc_per_seed;
    for (auto seed : seed_set) {
        std::vector<int> labels, predictions;
        std::vector<double> scores;
        for (const auto& inst : instances) {
            if (inst.seed != seed) continue;
            labels.push_back(inst.label);
            predictions.push_back(inst.prediction);
            if (scoring) {
                double s = *inst.score;
                // Orient so that higher means more likely failure.
                scores.push_back(*direction == ScoreDirection::LowIndicatesFailure ? -s : s);
            }
        }
        bal_per_seed.push_back(balanced_accuracy_percent(labels, predictions));
        f1_per_seed.push_back(f1_percent(labels, predictions));
        if (scoring) auc_per_seed.push_back(pr_auc_percent(labels, scores));
    }

    DetectorReport report;
    report.detector_name = detector_name;
    report.balanced_accuracy = summarize(std::move(bal_per_seed));
    report.f1 = summarize(std::move(f1_per_seed));
    if (scoring) report.pr_auc = summarize(std::move(auc_per_seed));

    std::set<std::string> languages;
    for (const auto& inst : instances) languages.insert(inst.language);
    for (const auto& language : languages) {
        std::vector<double> per_seed;
        for (auto seed : seed_set) {
            std::vector<int> labels, predictions;
            for (const auto& inst : instances) {
                if (inst.seed != seed || inst.language != language) continue;
                labels.push_back(inst.label);
                predictions.push_back(inst.prediction);
            }
            if (labels.empty()) continue;
            // Per-language breakdown uses the F1 = 0 convention when a
            // (language, seed) slice has no positives.
            per_seed.push_back(f1_percent(labels, predictions));
        }
        report.per_language_f1[language] = summarize(std::move(per_seed));
    }
    return report;
}

}  // namespace rgap
