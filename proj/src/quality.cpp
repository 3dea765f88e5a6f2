#include "rgap/quality.hpp"

#include "rgap/assets.hpp"
#include "rgap/common.hpp"

namespace rgap {

double score_translation_corpus(const std::vector<TranslationPair>& pairs, Judge& judge) {
    if (pairs.empty()) fail(ErrorKind::Precondition, "translation corpus is empty");
    double sum = 0.0;
    std::size_t scored = 0;
    for (const auto& pair : pairs) {
        try {
            sum += judge.assess_translation(pair.source, pair.hypothesis, pair.src_lang,
                                            pair.tgt_lang);
            ++scored;
        } catch (const Error& e) {
            warn("translation assessment failed for one pair: " + std::string(e.what()));
        }
    }
    if (scored == 0) fail(ErrorKind::Metric, "every pair failed translation assessment");
    return sum / static_cast<double>(scored);
}

QualityCorrelation correlate_quality(const std::vector<QualityPoint>& points) {
    std::vector<double> x, y;
    x.reserve(points.size());
    y.reserve(points.size());
    for (const auto& p : points) {
        x.push_back(p.translation_score);
        y.push_back(p.performance_ratio);
    }
    QualityCorrelation out;
    out.pearson_r = pearson_correlation(x, y);
    out.trend = fit_trend_line(x, y);
    out.points = points;
    return out;
}

std::string elicit_translation(ReasoningBackend& backend, const Sample& sample) {
    std::string prompt = render_template(
        assets::kElicitTranslationPrompt,
        {{"src_lang", sample.language.code}, {"text", sample.question}});
    GenerateRequest request;
    request.sample = sample;
    request.prompt = prompt;
    request.sampling.temperature = 0.0;
    GenerationRecord record = backend.generate(request);
    return record.response.empty() ? record.trace : record.response;
}

}  // namespace rgap
