#include "rgap/classifiers.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rgap/assets.hpp"
#include "rgap/common.hpp"
#include "rgap/digest.hpp"

namespace rgap {

HashedNgramEncoder::HashedNgramEncoder(int dim, std::size_t max_chars)
    : dim_(dim), max_chars_(max_chars) {}

std::string HashedNgramEncoder::id() const {
    return "hashed-ngram-" + std::to_string(dim_);
}

std::vector<double> HashedNgramEncoder::encode(const std::string& text) const {
    std::vector<double> v(dim_, 0.0);
    std::istringstream words(text);
    std::string word;
    while (words >> word) {
        std::uint64_t h = fnv1a64(word);
        v[h % static_cast<std::uint64_t>(dim_)] += 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    return v;
}

std::string build_classifier_input(const std::string& question, const std::string& trace,
                                   std::size_t max_chars) {
    static const char* separator = "\n[SEP]\n";
    std::string input = question + separator;
    if (input.size() + trace.size() <= max_chars) return input + trace;
    std::size_t room = input.size() >= max_chars ? 0 : max_chars - input.size();
    warn("classifier input exceeds the encoder limit; truncating the trace tail");
    return input + trace.substr(0, room);
}

// ---------------------------------------------------------------------------
// TrainedDetector

double TrainedDetector::probability(const std::vector<double>& features, ParallelMode mode) const {
    return model.predict_proba(features, mode);
}

int TrainedDetector::predict(const std::vector<double>& features, ParallelMode mode) const {
    double cut = threshold.value_or(0.5);
    return probability(features, mode) >= cut ? 1 : 0;
}

void TrainedDetector::save(const std::string& path) const {
    json j;
    j["artifact"] = "failure-detector";
    j["asset_version"] = assets::kAssetVersion;
    j["type"] = type;
    j["hyperparameters"] = hyperparameters;
    j["model"] = model.to_json();
    if (threshold) j["threshold"] = *threshold;
    j["training_data_digest"] = training_data_digest;
    if (!encoder_id.empty()) j["encoder_id"] = encoder_id;
    j["best_val_f1"] = best_val_f1;
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Config, "cannot write detector artifact: " + path);
    out << j.dump(2) << "\n";
}

TrainedDetector TrainedDetector::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Upstream, "missing detector artifact: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || j.value("artifact", std::string()) != "failure-detector")
        fail(ErrorKind::Schema, "not a detector artifact: " + path);
    TrainedDetector d;
    d.type = j.at("type").get<std::string>();
    d.hyperparameters = j.value("hyperparameters", json::object());
    d.model = MlpClassifier::from_json(j.at("model"));
    if (j.contains("threshold")) d.threshold = j.at("threshold").get<double>();
    d.training_data_digest = j.value("training_data_digest", std::string());
    d.encoder_id = j.value("encoder_id", std::string());
    d.best_val_f1 = j.value("best_val_f1", 0.0);
    return d;
}

// ---------------------------------------------------------------------------
// Training

namespace {

std::string digest_training_data(const std::vector<std::vector<double>>& features,
                                 const std::vector<int>& labels) {
    json j;
    j["labels"] = labels;
    json rows = json::array();
    for (const auto& x : features) rows.push_back(x);
    j["features"] = rows;
    return sha256_hex(canonical_json(j));
}

}  // namespace

TrainedDetector train_text_classifier(const std::vector<TextInstance>& data,
                                      const TextEncoder& encoder, const TextClassifierHp& hp,
                                      ParallelMode mode) {
    if (data.empty()) fail(ErrorKind::Training, "no labeled traces to train on");

    std::vector<std::vector<double>> features(data.size());
    std::vector<int> labels(data.size());
    parallel_for(data.size(), mode, [&](std::size_t i) {
        std::string input =
            build_classifier_input(data[i].question, data[i].trace, encoder.max_chars());
        features[i] = encoder.encode(input);
    });
    for (std::size_t i = 0; i < data.size(); ++i) labels[i] = data[i].label;

    MlpTrainConfig config;
    config.hidden_dim = hp.hidden_dim;
    config.learning_rate = hp.learning_rate;
    config.batch_size = hp.batch_size;
    config.max_epochs = hp.max_epochs;
    config.patience = hp.patience;
    config.validation_fraction = hp.validation_fraction;
    config.seed = hp.seed;

    MlpTrainResult trained = train_mlp(features, labels, config, mode);

    TrainedDetector d;
    d.type = "text-classifier";
    d.model = std::move(trained.model);
    d.hyperparameters = {{"max_epochs", hp.max_epochs},
                         {"batch_size", hp.batch_size},
                         {"learning_rate", hp.learning_rate},
                         {"patience", hp.patience},
                         {"hidden_dim", hp.hidden_dim},
                         {"seed", hp.seed},
                         {"best_epoch", trained.best_epoch},
                         {"epochs_run", trained.epochs_run}};
    d.encoder_id = encoder.id();
    d.training_data_digest = digest_training_data(features, labels);
    d.best_val_f1 = trained.best_val_f1;
    return d;
}

std::vector<MlpTrainConfig> prober_grid(int input_dim, const ProberHp& hp) {
    const std::vector<double> learning_rates = {1e-3, 1e-4, 1e-5};
    const std::vector<int> hidden_sizes = {0, 32, 128, 512, input_dim / 2, input_dim};
    std::vector<MlpTrainConfig> grid;
    grid.reserve(learning_rates.size() * hidden_sizes.size());
    for (double lr : learning_rates) {
        for (int hidden : hidden_sizes) {
            MlpTrainConfig config;
            config.hidden_dim = hidden;
            config.learning_rate = lr;
            config.batch_size = hp.batch_size;
            config.max_epochs = hp.max_epochs;
            config.patience = hp.patience;
            config.validation_fraction = hp.validation_fraction;
            config.seed = hp.seed;
            grid.push_back(config);
        }
    }
    return grid;
}

TrainedDetector train_prober(const std::vector<VectorInstance>& data, const ProberHp& hp,
                             ParallelMode mode) {
    if (data.empty()) fail(ErrorKind::Training, "no labeled vectors to train on");
    const int dim = static_cast<int>(data[0].features.size());
    std::vector<std::vector<double>> features(data.size());
    std::vector<int> labels(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (static_cast<int>(data[i].features.size()) != dim)
            fail(ErrorKind::Training, "hidden-state vectors must share one dimension");
        features[i] = data[i].features;
        labels[i] = data[i].label;
    }

    std::vector<MlpTrainConfig> grid = prober_grid(dim, hp);
    std::vector<MlpTrainResult> results(grid.size());
    // Each configuration trains independently with its own seeded state, so
    // parallelizing the grid cannot change any result.
    parallel_for(grid.size(), mode,
                 [&](std::size_t i) { results[i] = train_mlp(features, labels, grid[i],
                                                             ParallelMode::Serial); });

    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].best_val_f1 > results[best].best_val_f1) best = i;

    TrainedDetector d;
    d.type = "prober";
    d.model = std::move(results[best].model);
    d.hyperparameters = {{"learning_rate", grid[best].learning_rate},
                         {"hidden_dim", grid[best].hidden_dim},
                         {"batch_size", hp.batch_size},
                         {"max_epochs", hp.max_epochs},
                         {"patience", hp.patience},
                         {"seed", hp.seed},
                         {"grid_size", grid.size()},
                         {"best_epoch", results[best].best_epoch}};
    d.training_data_digest = digest_training_data(features, labels);
    d.best_val_f1 = results[best].best_val_f1;
    return d;
}

// ---------------------------------------------------------------------------
// Detector handles

ProberDetector::ProberDetector(TrainedDetector detector) : detector_(std::move(detector)) {}

int ProberDetector::flag(const DetectionSignals& signals) const {
    return detector_.predict(signals.hidden);
}

std::optional<double> ProberDetector::score(const DetectionSignals& signals) const {
    return detector_.probability(signals.hidden);
}

TextClassifierDetector::TextClassifierDetector(TrainedDetector detector,
                                               std::shared_ptr<const TextEncoder> encoder,
                                               std::map<std::string, std::string> questions)
    : detector_(std::move(detector)),
      encoder_(std::move(encoder)),
      questions_by_sample_(std::move(questions)) {}

int TextClassifierDetector::flag(const DetectionSignals& signals) const {
    return *score(signals) >= detector_.threshold.value_or(0.5) ? 1 : 0;
}

std::optional<double> TextClassifierDetector::score(const DetectionSignals& signals) const {
    auto it = questions_by_sample_.find(signals.sample_id);
    std::string question = it != questions_by_sample_.end() ? it->second : std::string();
    std::string input = build_classifier_input(question, signals.trace_text, encoder_->max_chars());
    return detector_.probability(encoder_->encode(input));
}

const char* signal_kind_name(SignalKind kind) {
    switch (kind) {
        case SignalKind::AvgConf: return "avg-confidence";
        case SignalKind::MinConf: return "min-confidence";
        case SignalKind::InputNll: return "input-nll";
    }
    return "avg-confidence";
}

SignalKind signal_kind_from_name(const std::string& name) {
    if (name == "avg-confidence") return SignalKind::AvgConf;
    if (name == "min-confidence") return SignalKind::MinConf;
    if (name == "input-nll") return SignalKind::InputNll;
    fail(ErrorKind::Config, "unknown signal kind: " + name);
}

double signal_value(const DetectionSignals& signals, SignalKind kind) {
    switch (kind) {
        case SignalKind::AvgConf: return signals.avg_conf;
        case SignalKind::MinConf: return signals.min_conf;
        case SignalKind::InputNll: return signals.input_nll;
    }
    return signals.avg_conf;
}

ScoreDirection signal_direction(SignalKind kind) {
    return kind == SignalKind::InputNll ? ScoreDirection::HighIndicatesFailure
                                        : ScoreDirection::LowIndicatesFailure;
}

ThresholdDetector::ThresholdDetector(SignalKind kind, double threshold)
    : kind_(kind), threshold_(threshold) {}

std::string ThresholdDetector::name() const { return signal_kind_name(kind_); }

int ThresholdDetector::flag(const DetectionSignals& signals) const {
    return classify_with_threshold(signal_value(signals, kind_), threshold_,
                                   signal_direction(kind_));
}

std::optional<double> ThresholdDetector::score(const DetectionSignals& signals) const {
    return signal_value(signals, kind_);
}

ScriptedDetector::ScriptedDetector(std::set<std::string> flagged) : flagged_(std::move(flagged)) {}

int ScriptedDetector::flag(const DetectionSignals& signals) const {
    return flagged_.count(signals.sample_id) > 0 ? 1 : 0;
}

}  // namespace rgap
