#include <doctest.h>

#include <random>

#include "rgap/classifiers.hpp"
#include "rgap/common.hpp"
#include "test_helpers.hpp"

using namespace rgap;

TEST_CASE("inverse-frequency class weights") {
    // N = 100, n1 = 20: w1 = 2.5, w0 = 0.625.
    std::vector<int> labels(100, 0);
    for (int i = 0; i < 20; ++i) labels[i] = 1;
    ClassWeights w = inverse_frequency_weights(labels);
    CHECK(w.w1 == doctest::Approx(2.5));
    CHECK(w.w0 == doctest::Approx(0.625));

    // Balanced data: both weights are exactly one, so the weighted loss
    // equals the unweighted loss.
    std::vector<int> balanced(50, 0);
    for (int i = 0; i < 25; ++i) balanced[i] = 1;
    ClassWeights wb = inverse_frequency_weights(balanced);
    CHECK(wb.w1 == doctest::Approx(1.0));
    CHECK(wb.w0 == doctest::Approx(1.0));

    CHECK_THROWS_AS(inverse_frequency_weights(std::vector<int>(10, 0)), Error);
}

namespace {

std::vector<TextInstance> planted_token_corpus(std::size_t n, std::uint64_t seed) {
    // Token "CONFUSED" appears iff the label is 1.
    std::mt19937_64 rng(seed);
    std::vector<TextInstance> data;
    const char* fillers[] = {"solve", "the", "problem", "with", "steps", "algebra",
                             "numbers", "compute", "result", "check"};
    for (std::size_t i = 0; i < n; ++i) {
        TextInstance t;
        t.label = i % 4 == 0 ? 1 : 0;
        t.question = "what is the value of x";
        std::string trace = "let me think";
        for (int w = 0; w < 12; ++w) trace += std::string(" ") + fillers[rng() % 10];
        if (t.label == 1) trace += " CONFUSED CONFUSED this is CONFUSED";
        t.trace = trace;
        data.push_back(std::move(t));
    }
    return data;
}

std::vector<VectorInstance> separable_vectors(std::size_t n, int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.2);
    std::vector<VectorInstance> data;
    for (std::size_t i = 0; i < n; ++i) {
        VectorInstance v;
        v.label = i % 4 == 0 ? 1 : 0;
        v.features.resize(dim);
        for (auto& x : v.features) x = noise(rng);
        v.features[0] += v.label == 1 ? 1.0 : -1.0;
        data.push_back(std::move(v));
    }
    return data;
}

}  // namespace

TEST_CASE("text classifier separates the planted-token corpus") {
    HashedNgramEncoder encoder(256);
    TextClassifierHp hp;
    hp.seed = 32;
    auto data = planted_token_corpus(120, 5);
    TrainedDetector detector = train_text_classifier(data, encoder, hp);
    CHECK(detector.best_val_f1 == doctest::Approx(100.0));
    CHECK(detector.type == "text-classifier");
    CHECK(detector.encoder_id == encoder.id());

    // Within five epochs per the separable-fixture expectation.
    CHECK(detector.hyperparameters.at("best_epoch").get<int>() <= 5);

    // Held-out style check: fresh items classify by the planted token.
    auto probe = [&](const std::string& trace) {
        std::string input = build_classifier_input("q", trace, encoder.max_chars());
        return detector.predict(encoder.encode(input));
    };
    CHECK(probe("something CONFUSED entirely new CONFUSED CONFUSED") == 1);
    CHECK(probe("clean reasoning with steps and algebra") == 0);
}

TEST_CASE("single-class data cannot train") {
    HashedNgramEncoder encoder(64);
    TextClassifierHp hp;
    auto data = planted_token_corpus(40, 5);
    for (auto& t : data) t.label = 0;
    CHECK_THROWS_AS(train_text_classifier(data, encoder, hp), Error);
}

TEST_CASE("prober grid enumerates exactly 18 configurations for any dim") {
    ProberHp hp;
    for (int dim : {4, 64, 999, 4096}) {
        auto grid = prober_grid(dim, hp);
        CHECK(grid.size() == 18);
        // 3 learning rates x 6 hidden sizes, including the linear probe.
        int linear = 0;
        for (const auto& config : grid) linear += config.hidden_dim == 0 ? 1 : 0;
        CHECK(linear == 3);
    }
}

TEST_CASE("linear probe reaches F1 = 100 on linearly separable vectors") {
    ProberHp hp;
    hp.seed = 32;
    auto data = separable_vectors(160, 16, 7);
    TrainedDetector detector = train_prober(data, hp);
    CHECK(detector.best_val_f1 == doctest::Approx(100.0));
    CHECK(detector.type == "prober");

    // Fresh points classify by the separating coordinate.
    std::vector<double> positive(16, 0.0), negative(16, 0.0);
    positive[0] = 1.0;
    negative[0] = -1.0;
    CHECK(detector.predict(positive) == 1);
    CHECK(detector.predict(negative) == 0);
}

TEST_CASE("label-shuffled control stays near the chance baseline") {
    ProberHp hp;
    hp.seed = 32;
    auto data = separable_vectors(160, 16, 7);
    // Destroy the feature-label association.
    std::mt19937_64 rng(99);
    std::vector<int> labels;
    for (const auto& v : data) labels.push_back(v.label);
    std::shuffle(labels.begin(), labels.end(), rng);
    for (std::size_t i = 0; i < data.size(); ++i) data[i].label = labels[i];

    TrainedDetector shuffled = train_prober(data, hp);
    // With 25% positives, chance-level F1 on the validation split sits well
    // below separation; anything near 100 means leakage.
    CHECK(shuffled.best_val_f1 < 90.0);
}

TEST_CASE("dimension mismatches are a training error") {
    auto data = separable_vectors(20, 8, 7);
    data[3].features.resize(5);
    CHECK_THROWS_AS(train_prober(data, ProberHp{}), Error);
}

TEST_CASE("detector artifacts round-trip") {
    rgap_test::TempDir dir("artifact");
    auto data = separable_vectors(80, 8, 7);
    ProberHp hp;
    hp.seed = 42;
    TrainedDetector detector = train_prober(data, hp);
    detector.threshold = 0.5;

    auto path = (dir.path() / "prober.json").string();
    detector.save(path);
    TrainedDetector loaded = TrainedDetector::load(path);
    CHECK(loaded.type == detector.type);
    CHECK(loaded.model.to_json() == detector.model.to_json());
    CHECK(loaded.training_data_digest == detector.training_data_digest);
    CHECK(loaded.threshold == detector.threshold);

    std::vector<double> x(8, 0.3);
    CHECK(loaded.probability(x) == doctest::Approx(detector.probability(x)));
}

TEST_CASE("classifier input truncates the trace tail at the encoder limit") {
    std::string question = "short question";
    std::string trace(100, 'x');
    std::string input = build_classifier_input(question, trace, 40);
    CHECK(input.size() == 40);
    CHECK(input.rfind(question, 0) == 0);  // question kept, trace tail cut
}

TEST_CASE("threshold detector flags by direction") {
    DetectionSignals signals;
    signals.avg_conf = 2.0;
    signals.input_nll = 5.0;

    ThresholdDetector low_conf(SignalKind::AvgConf, 3.0);  // low confidence = failure
    CHECK(low_conf.flag(signals) == 1);
    signals.avg_conf = 4.0;
    CHECK(low_conf.flag(signals) == 0);

    ThresholdDetector high_nll(SignalKind::InputNll, 4.0);  // high NLL = failure
    CHECK(high_nll.flag(signals) == 1);
    signals.input_nll = 3.0;
    CHECK(high_nll.flag(signals) == 0);
}

TEST_CASE("scripted detector flags exactly the listed samples") {
    ScriptedDetector detector({"a", "c"});
    DetectionSignals signals;
    signals.sample_id = "a";
    CHECK(detector.flag(signals) == 1);
    signals.sample_id = "b";
    CHECK(detector.flag(signals) == 0);
}
