#pragma once

#include <string>
#include <vector>

#include "rgap/backends.hpp"
#include "rgap/stats.hpp"

namespace rgap {

struct TranslationPair {
    std::string source;
    std::string hypothesis;
    std::string src_lang;
    std::string tgt_lang = "en";
};

// Mean judge-assessed score over a pair corpus (0..100 per pair). Pairs whose
// assessment fails are skipped with a warning; all pairs failing is an error.
double score_translation_corpus(const std::vector<TranslationPair>& pairs, Judge& judge);

struct QualityPoint {
    std::string model_id;
    std::string language;
    double translation_score = 0.0;  // [0,100]
    double performance_ratio = 0.0;
};

struct QualityCorrelation {
    double pearson_r = 0.0;
    TrendLine trend;
    std::vector<QualityPoint> points;
};

// Correlates translation quality with the reasoning performance ratio across
// (model, language) points.
QualityCorrelation correlate_quality(const std::vector<QualityPoint>& points);

// Produces the model's own translation of `text` via the elicitation prompt.
std::string elicit_translation(ReasoningBackend& backend, const Sample& sample);

}  // namespace rgap
