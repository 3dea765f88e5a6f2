#include <doctest.h>

#include <cmath>
#include <random>

#include "rgap/common.hpp"
#include "rgap/detection.hpp"
#include "rgap/scripted.hpp"
#include "test_helpers.hpp"

using namespace rgap;

namespace {

TopkMatrix uniform_topk(std::size_t rows, std::size_t width, double p) {
    TopkMatrix m;
    m.width = width;
    m.entries.resize(rows * width);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < width; ++c)
            m.entries[r * width + c] = {static_cast<std::int32_t>(c), std::log(p)};
    return m;
}

TopkMatrix row_with_confidence(std::vector<double> target_c, std::size_t width) {
    // Builds rows whose per-row confidence equals the requested value:
    // all entries share logprob -c.
    TopkMatrix m;
    m.width = width;
    for (double c : target_c)
        for (std::size_t j = 0; j < width; ++j)
            m.entries.push_back({static_cast<std::int32_t>(j), -c});
    return m;
}

}  // namespace

TEST_CASE("token confidence closed form on uniform rows") {
    // Uniform p = 1/1000 over the top 20: c_t = ln 1000.
    auto conf = token_confidence(uniform_topk(5, 20, 1.0 / 1000.0), 20);
    for (double c : conf.series) CHECK(rgap_test::near(c, std::log(1000.0)).epsilon(1e-12)); CHECK(conf.avg == doctest::Approx(std::log(1000.0)).epsilon(1e-12)); CHECK(conf.min == doctest::Approx(std::log(1000.0)).epsilon(1e-12)); // Uniform over 10 entries with K=20: K' = min(20, 10) = 10, c_t = ln 10. auto conf10 = token_confidence(uniform_topk(3, 10, 0.1), 20); CHECK(conf10.avg == doctest::Approx(std::log(10.0)).epsilon(1e-12)); } TEST_CASE("avg and min confidence over a two-step series") { auto conf = token_confidence(row_with_confidence({2.0, 6.0}, 4), 20); CHECK(conf.avg == doctest::Approx(4.0)); CHECK(conf.min == doctest::Approx(2.0)); } TEST_CASE("min <= mean on random series; both reorder-invariant") { std::mt19937_64 rng(3); std::uniform_real_distribution<double> c_value(0.1, 12.0); for (int trial = 0; trial < 100; ++trial) { std::size_t rows = 1 + rng() % 30; std::vector<double> cs(rows); for (auto& c : cs) c = c_value(rng); auto conf = token_confidence(row_with_confidence(cs, 8), 20); CHECK(conf.min <= conf.avg + 1e-12); std::vector<double> shuffled = cs; std::shuffle(shuffled.begin(), shuffled.end(), rng); auto conf2 = token_confidence(row_with_confidence(shuffled, 8), 20); CHECK(conf2.avg == doctest::Approx(conf.avg, 1e-9));
        CHECK(rgap_test::near(conf2.min, conf.min, 1e-9));
    }
}

TEST_CASE("probability floor keeps logs finite") {
    TopkMatrix m;
    m.width = 2;
    m.entries = {{0, -1.0}, {1, -1e9}};  // effectively zero probability
    auto conf = token_confidence(m, 20);
    CHECK(rgap_test::near(std::isfinite(conf.avg)); // The floored entry contributes -log(1e-12). CHECK(conf.avg, 0.5 * (1.0 + -std::log(1e-12)))); } TEST_CASE("empty trace has no confidence signal") { TopkMatrix empty; empty.width = 4; CHECK_THROWS_AS(token_confidence(empty, 20), Error); } TEST_CASE("input NLL is a mean, not a sum") { CHECK(input_nll({-1.0, -3.0}) == doctest::Approx(2.0)); CHECK(input_nll({0.0, 0.0, 0.0}) == 0.0); // certain prompt // Longer but identically-distributed prompt keeps the same NLL. std::vector<double> short_prompt = {-1.5, -2.5}; std::vector<double> long_prompt = {-1.5, -2.5, -1.5, -2.5, -1.5, -2.5}; CHECK(input_nll(short_prompt) == doctest::Approx(input_nll(long_prompt))); CHECK_THROWS_AS(input_nll({}), Error); } TEST_CASE("self reflection parses the continuation verdict") { auto fixture = rgap_test::basic_fixture(); fixture.reflections["no-case"] = " NO, I was confused."; fixture.reflections["yes-case"] = " YES"; fixture.reflections["odd-case"] = " maybe"; ScriptedBackend backend(fixture); std::string trace = "thinking hard </think>"; auto no_verdict = self_reflect(backend, rgap_test::math_sample("no-case", "sw", "q", "1"), trace); CHECK(no_verdict.prediction == 1); CHECK_FALSE(no_verdict.parse_failed); auto yes_verdict = self_reflect(backend, rgap_test::math_sample("yes-case", "en", "q", "1"), trace); CHECK(yes_verdict.prediction == 0); // Unparseable continuations default to understood, flagged. auto odd_verdict = self_reflect(backend, rgap_test::math_sample("odd-case", "en", "q", "1"), trace); CHECK(odd_verdict.prediction == 0); CHECK(odd_verdict.parse_failed); } TEST_CASE("threshold calibration on separable scores") { // Failures score low: any threshold in (0.2, 0.8) attains F1 = 100. std::vector<double> scores = {0.1, 0.2, 0.8, 0.9}; std::vector<int> labels = {1, 1, 0, 0}; ThresholdResult r = calibrate_threshold(scores, labels, ScoreDirection::LowIndicatesFailure); CHECK(r.f1 == doctest::Approx(100.0)); CHECK(r.threshold > 0.2); CHECK(r.threshold < 0.8); CHECK_FALSE(r.degenerate); } TEST_CASE("degenerate calibration warns on a single distinct score") { ThresholdResult r = calibrate_threshold({0.5, 0.5, 0.5}, {1, 0, 0}, ScoreDirection::LowIndicatesFailure); CHECK(r.degenerate); } TEST_CASE("calibrated threshold replays its own F1 and is optimal") { std::mt19937_64 rng(17); std::uniform_real_distribution<double> score(0.0, 1.0); for (int trial = 0; trial < 50; ++trial) { std::size_t n = 5 + rng() % 40; std::vector<double> scores(n); std::vector<int> labels(n); for (std::size_t i = 0; i < n; ++i) { scores[i] = score(rng); labels[i] = rng() % 3 == 0 ? 1 : 0; } auto direction = trial % 2 == 0 ? ScoreDirection::LowIndicatesFailure : ScoreDirection::HighIndicatesFailure; ThresholdResult r = calibrate_threshold(scores, labels, direction); // Replaying the returned threshold reproduces the reported F1. std::vector<int> predictions(n); for (std::size_t i = 0; i < n; ++i) predictions[i] = classify_with_threshold(scores[i], r.threshold, direction); CHECK(f1_percent(labels, predictions) == doctest::Approx(r.f1)); // No candidate achieves a higher F1 (exhaustive sweep). std::vector<double> sorted = scores; std::sort(sorted.begin(), sorted.end()); sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end()); std::vector<double> candidates = {-1e308, 1e308}; for (std::size_t i = 1; i < sorted.size(); ++i) candidates.push_back(0.5 * (sorted[i - 1] + sorted[i])); for (double candidate : candidates) { for (std::size_t i = 0; i < n; ++i) predictions[i] = classify_with_threshold(scores[i], candidate, direction); CHECK(f1_percent(labels, predictions) <= r.f1 + 1e-9); } } } TEST_CASE("random baseline respects the per-language proportions") { RandomBaseline never({{"sw", 0.0}}, 0.0, 7); RandomBaseline always({{"sw", 1.0}}, 1.0, 7); for (int i = 0; i < 50; ++i) { CHECK(never.predict("sw", "s" + std::to_string(i)) == 0); CHECK(always.predict("sw", "s" + std::to_string(i)) == 1); } // Law of large numbers: empirical rate approaches p. RandomBaseline p30({{"sw", 0.3}}, 0.3, 7); int positives = 0; constexpr int kSamples = 100000; for (int i = 0; i < kSamples; ++i) positives += p30.predict("sw", "sample-" + std::to_string(i)); double rate = static_cast<double>(positives) / kSamples; CHECK(rate == doctest::Approx(0.3, 0.01));

    // Unseen language falls back to the global proportion.
    CHECK(rgap_test::near(RandomBaseline({{"sw", 1.0}}, 0.0, 7).predict("xx", "s0") == 0); } TEST_CASE("random baseline proportions come from calibration labels") { std::vector<LabeledInstance> calibration; for (int i = 0; i < 10; ++i) { LabeledInstance li; li.sample_id = "c" + std::to_string(i); li.language = "sw"; li.seed = 32; li.label = i < 3 ? FailureLabel::NotUnderstood : FailureLabel::Understood; calibration.push_back(li); } LabeledInstance excluded; excluded.sample_id = "cx"; excluded.language = "sw"; excluded.label = FailureLabel::Excluded; calibration.push_back(excluded); // excluded rows do not count RandomBaseline baseline = RandomBaseline::from_calibration(calibration, 7); CHECK(baseline.proportion_for("sw"), 0.3)); } TEST_CASE("detector metrics: floors and ceilings") { std::vector<EvalInstance> instances; for (int i = 0; i < 20; ++i) { EvalInstance inst; inst.language = i % 2 == 0 ? "sw" : "te"; inst.seed = 32; inst.label = i < 5 ? 1 : 0; inst.prediction = inst.label; // perfect predictor instances.push_back(inst); } DetectorReport perfect = evaluate_detector(instances, std::nullopt, "perfect"); CHECK(perfect.balanced_accuracy.mean == doctest::Approx(100.0)); CHECK(perfect.f1.mean == doctest::Approx(100.0)); CHECK_FALSE(perfect.pr_auc.has_value()); for (auto& inst : instances) inst.prediction = 0; // always negative DetectorReport negative = evaluate_detector(instances, std::nullopt, "always-negative"); CHECK(negative.balanced_accuracy.mean == doctest::Approx(50.0)); CHECK(negative.f1.mean == doctest::Approx(0.0)); } TEST_CASE("single-class label sets raise a metric error") { std::vector<EvalInstance> instances(4); for (auto& inst : instances) { inst.language = "sw"; inst.seed = 32; inst.label = 0; inst.prediction = 0; } try { evaluate_detector(instances, std::nullopt, "degenerate"); FAIL("expected metric error"); } catch (const Error& e) { CHECK(e.kind() == ErrorKind::Metric); CHECK(std::string(e.what()).find("balanced accuracy") != std::string::npos); } } TEST_CASE("PR-AUC invariance under strictly monotone transforms") { std::mt19937_64 rng(23); std::uniform_real_distribution<double> score(-2.0, 2.0); std::vector<int> labels(60); std::vector<double> scores(60); for (std::size_t i = 0; i < labels.size(); ++i) { labels[i] = rng() % 4 == 0 ? 1 : 0; scores[i] = score(rng); } labels[0] = 1; // at least one positive double base_auc = pr_auc_percent(labels, scores); std::vector<std::function<double(double)>> transforms = { [](double s) { return 3.0 * s + 2.0; }, [](double s) { return std::exp(s); }, [](double s) { return std::atan(s); }, [](double s) { return s * s * s; }, [](double s) { return std::tanh(s) * 10.0; }, [](double s) { return std::exp(s) + s; }, [](double s) { return s / 7.0 - 100.0; }, [](double s) { return std::asinh(s); }, [](double s) { return std::pow(2.0, s); }, [](double s) { return s + std::tanh(s); }, }; for (const auto& transform : transforms) { std::vector<double> transformed(scores.size()); for (std::size_t i = 0; i < scores.size(); ++i) transformed[i] = transform(scores[i]); CHECK(pr_auc_percent(labels, transformed) == doctest::Approx(base_auc, 1e-9));
    }
}

TEST_CASE("PR-AUC of a perfect ranker is 100") {
    std::vector<int> labels = {1, 1, 0, 0, 0};
    std::vector<double> scores = {0.9, 0.8, 0.3, 0.2, 0.1};
    CHECK(pr_auc_percent(labels, scores) == doctest::Approx(100.0));
}

TEST_CASE("detector report aggregates over seeds with per-language breakdown") {
    std::vector<EvalInstance> instances;
    for (std::uint64_t seed : {32u, 42u}) {
        for (int i = 0; i < 10; ++i) {
            EvalInstance inst;
            inst.language = i % 2 == 0 ? "sw" : "te";
            inst.seed = seed;
            inst.label = i < 3 ? 1 : 0;
            // Perfect at seed 32, always-wrong-on-positives at seed 42.
            inst.prediction = seed == 32 ? inst.label : 0;
            inst.score = inst.prediction == 1 ? 0.9 : 0.1;
            instances.push_back(inst);
        }
    }
    DetectorReport report =
        evaluate_detector(instances, ScoreDirection::HighIndicatesFailure, "mixed");
    CHECK(report.balanced_accuracy.per_seed.size() == 2);
    CHECK(report.balanced_accuracy.per_seed[0] == doctest::Approx(100.0));
    CHECK(report.balanced_accuracy.per_seed[1] == doctest::Approx(50.0));
    CHECK(report.balanced_accuracy.mean == doctest::Approx(75.0));
    CHECK(report.pr_auc.has_value());
    CHECK(report.per_language_f1.count("sw") == 1);
    CHECK(report.per_language_f1.count("te") == 1);
}

TEST_CASE("excluded instances must be removed before evaluation") {
    std::vector<EvalInstance> instances(2);
    instances[0].label = 1;
    instances[1].label = 2;  // not a 0/1 label
    CHECK_THROWS_AS(evaluate_detector(instances, std::nullopt, "bad"), Error);
}
