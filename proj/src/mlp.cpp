#include "rgap/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rgap/common.hpp"
#include "rgap/detection.hpp"

namespace rgap {

ClassWeights inverse_frequency_weights(const std::vector<int>& labels) {
    std::size_t n1 = 0;
    for (int y : labels) n1 += y == 1 ? 1 : 0;
    std::size_t n0 = labels.size() - n1;
    if (n0 == 0 || n1 == 0)
        fail(ErrorKind::Training, "class weights need both classes present");
    double n = static_cast<double>(labels.size());
    return {n / (2.0 * static_cast<double>(n1)), n / (2.0 * static_cast<double>(n0))};
}

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

MlpClassifier::MlpClassifier(int input_dim, int hidden_dim, std::uint64_t init_seed)
    : input_dim_(input_dim), hidden_dim_(hidden_dim) {
    std::mt19937_64 rng(init_seed);
    auto uniform_init = [&](std::vector<double>& w, int fan_in) {
        double bound = 1.0 / std::sqrt(static_cast<double>(std::max(fan_in, 1)));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (auto& v : w) v = dist(rng);
    };
    if (hidden_dim_ > 0) {
        w1_.resize(static_cast<std::size_t>(hidden_dim_) * input_dim_);
        b1_.assign(hidden_dim_, 0.0);
        w2_.resize(hidden_dim_);
        uniform_init(w1_, input_dim_);
        uniform_init(w2_, hidden_dim_);
    } else {
        w2_.resize(input_dim_);
        uniform_init(w2_, input_dim_);
    }
    b2_ = 0.0;
}

double MlpClassifier::predict_logit(const std::vector<double>& x, ParallelMode mode) const {
    if (static_cast<int>(x.size()) != input_dim_)
        fail(ErrorKind::Training, "feature dimension mismatch: expected " +
                                      std::to_string(input_dim_) + ", got " +
                                      std::to_string(x.size()));
    if (hidden_dim_ == 0) {
        double z = b2_;
        for (int j = 0; j < input_dim_; ++j) z += w2_[j] * x[j];
        return z;
    }
    std::vector<double> h(hidden_dim_);
    parallel_for(static_cast<std::size_t>(hidden_dim_), mode, [&](std::size_t r) {
        double acc = b1_[r];
        const double* row = w1_.data() + r * input_dim_;
        for (int j = 0; j < input_dim_; ++j) acc += row[j] * x[j];
        h[r] = acc > 0.0 ? acc : 0.0;
    });
    double z = b2_;
    for (int r = 0; r < hidden_dim_; ++r) z += w2_[r] * h[r];
    return z;
}

double MlpClassifier::predict_proba(const std::vector<double>& x, ParallelMode mode) const {
    return sigmoid(predict_logit(x, mode));
}

std::vector<double> MlpClassifier::predict_proba_batch(const std::vector<std::vector<double>>& xs,
                                                       ParallelMode mode) const {
    std::vector<double> out(xs.size());
    parallel_for(xs.size(), mode,
                 [&](std::size_t i) { out[i] = sigmoid(predict_logit(xs[i], ParallelMode::Serial)); });
    return out;
}

json MlpClassifier::to_json() const {
    json j;
    j["input_dim"] = input_dim_;
    j["hidden_dim"] = hidden_dim_;
    j["w1"] = w1_;
    j["b1"] = b1_;
    j["w2"] = w2_;
    j["b2"] = b2_;
    return j;
}

MlpClassifier MlpClassifier::from_json(const json& j) {
    MlpClassifier m;
    m.input_dim_ = j.at("input_dim").get<int>();
    m.hidden_dim_ = j.at("hidden_dim").get<int>();
    m.w1_ = j.at("w1").get<std::vector<double>>();
    m.b1_ = j.at("b1").get<std::vector<double>>();
    m.w2_ = j.at("w2").get<std::vector<double>>();
    m.b2_ = j.at("b2").get<double>();
    return m;
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct AdamWState {
    std::vector<double> m, v;
    explicit AdamWState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adamw_update(std::vector<double>& w, const std::vector<double>& grad, AdamWState& state,
                  double lr, double weight_decay, int step, ParallelMode mode) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double bc1 = 1.0 - std::pow(beta1, step);
    double bc2 = 1.0 - std::pow(beta2, step);
    parallel_for(w.size(), mode, [&](std::size_t i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
        double mhat = state.m[i] / bc1;
        double vhat = state.v[i] / bc2;
        w[i] -= lr * (mhat / (std::sqrt(vhat) + eps) + weight_decay * w[i]);
    });
}

// Stratified index split: the held-out part takes ~fraction of each label
// group after a seeded shuffle.
void stratified_split(const std::vector<int>& labels, double fraction, std::uint64_t seed,
                      std::vector<std::size_t>& train_idx, std::vector<std::size_t>& val_idx) {
    std::vector<std::size_t> group0, group1;
    for (std::size_t i = 0; i < labels.size(); ++i)
        (labels[i] == 1 ? group1 : group0).push_back(i);
    std::mt19937_64 rng(seed ^ 0x5deece66dull);
    for (auto* group : {&group0, &group1}) {
        std::shuffle(group->begin(), group->end(), rng);
        std::size_t n_val = group->size() >= 2
                                ? std::max<std::size_t>(1, static_cast<std::size_t>(
                                                               std::llround(fraction * group->size())))
                                : 0;
        for (std::size_t i = 0; i < group->size(); ++i)
            (i < n_val ? val_idx : train_idx).push_back((*group)[i]);
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
}

}  // namespace

MlpTrainResult train_mlp(const std::vector<std::vector<double>>& features,
                         const std::vector<int>& labels, const MlpTrainConfig& config,
                         ParallelMode mode) {
    if (features.size() != labels.size() || features.empty())
        fail(ErrorKind::Training, "training needs matching non-empty features and labels");
    const int input_dim = static_cast<int>(features[0].size());
    for (const auto& x : features)
        if (static_cast<int>(x.size()) != input_dim)
            fail(ErrorKind::Training, "feature vectors must share one dimension");
    ClassWeights weights = inverse_frequency_weights(labels);

    std::vector<std::size_t> train_idx, val_idx;
    stratified_split(labels, config.validation_fraction, config.seed, train_idx, val_idx);
    if (train_idx.empty()) fail(ErrorKind::Training, "empty training split");

    MlpClassifier model(input_dim, config.hidden_dim, config.seed);
    const int hidden = config.hidden_dim;

    AdamWState s_w1(model.w1_.size()), s_b1(model.b1_.size());
    AdamWState s_w2(model.w2_.size());
    AdamWState s_b2(1);
    std::vector<double> g_w1(model.w1_.size()), g_b1(model.b1_.size()), g_w2(model.w2_.size());
    std::vector<double> b2_vec(1), g_b2(1);

    auto validation_f1 = [&]() {
        if (val_idx.empty()) return 0.0;
        std::vector<int> val_labels, val_preds;
        for (auto i : val_idx) {
            val_labels.push_back(labels[i]);
            val_preds.push_back(model.predict_proba(features[i], mode) >= 0.5 ? 1 : 0);
        }
        return f1_percent(val_labels, val_preds);
    };

    MlpTrainResult result;
    result.model = model;
    result.best_val_f1 = -1.0;
    int stale_epochs = 0;
    int step = 0;
    std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ull);

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::vector<std::size_t> order = train_idx;
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            std::size_t end = std::min(order.size(), start + config.batch_size);
            std::size_t batch = end - start;

            std::fill(g_w1.begin(), g_w1.end(), 0.0);
            std::fill(g_b1.begin(), g_b1.end(), 0.0);
            std::fill(g_w2.begin(), g_w2.end(), 0.0);
            g_b2[0] = 0.0;

            // Forward pass: hidden activations per batch element.
            std::vector<std::vector<double>> hs(batch);
            std::vector<double> dz(batch);
            for (std::size_t b = 0; b < batch; ++b) {
                const auto& x = features[order[start + b]];
                int y = labels[order[start + b]];
                double z;
                if (hidden > 0) {
                    auto& h = hs[b];
                    h.resize(hidden);
                    parallel_for(static_cast<std::size_t>(hidden), mode, [&](std::size_t r) {
                        double acc = model.b1_[r];
                        const double* row = model.w1_.data() + r * input_dim;
                        for (int j = 0; j < input_dim; ++j) acc += row[j] * x[j];
                        h[r] = acc > 0.0 ? acc : 0.0;
                    });
                    z = model.b2_;
                    for (int r = 0; r < hidden; ++r) z += model.w2_[r] * h[r];
                } else {
                    z = model.b2_;
                    for (int j = 0; j < input_dim; ++j) z += model.w2_[j] * x[j];
                }
                double w = y == 1 ? weights.w1 : weights.w0;
                dz[b] = w * (sigmoid(z) - y) / static_cast<double>(batch);
            }

            // Backward pass, row-parallel with serial inner sums.
            if (hidden > 0) {
                parallel_for(static_cast<std::size_t>(hidden), mode, [&](std::size_t r) {
                    double gw2 = 0.0, gb1 = 0.0;
                    double* gw1_row = g_w1.data() + r * input_dim;
                    for (std::size_t b = 0; b < batch; ++b) {
                        double h = hs[b][r];
                        gw2 += dz[b] * h;
                        if (h > 0.0) {
                            double dh = dz[b] * model.w2_[r];
                            gb1 += dh;
                            const auto& x = features[order[start + b]];
                            for (int j = 0; j < input_dim; ++j) gw1_row[j] += dh * x[j];
                        }
                    }
                    g_w2[r] = gw2;
                    g_b1[r] = gb1;
                });
            } else {
                parallel_for(static_cast<std::size_t>(input_dim), mode, [&](std::size_t j) {
                    double g = 0.0;
                    for (std::size_t b = 0; b < batch; ++b)
                        g += dz[b] * features[order[start + b]][j];
                    g_w2[j] = g;
                });
            }
            for (std::size_t b = 0; b < batch; ++b) g_b2[0] += dz[b];

            ++step;
            if (hidden > 0) {
                adamw_update(model.w1_, g_w1, s_w1, config.learning_rate, config.weight_decay,
                             step, mode);
                adamw_update(model.b1_, g_b1, s_b1, config.learning_rate, 0.0, step, mode);
            }
            adamw_update(model.w2_, g_w2, s_w2, config.learning_rate, config.weight_decay, step,
                         mode);
            b2_vec[0] = model.b2_;
            adamw_update(b2_vec, g_b2, s_b2, config.learning_rate, 0.0, step, mode);
            model.b2_ = b2_vec[0];
        }

        result.epochs_run = epoch;
        double f1 = validation_f1();
        if (f1 > result.best_val_f1) {
            result.best_val_f1 = f1;
            result.best_epoch = epoch;
            result.model = model;
            stale_epochs = 0;
        } else {
            ++stale_epochs;
            if (stale_epochs >= config.patience) break;
        }
    }
    if (result.best_epoch < 0) result.model = model;
    if (result.best_val_f1 < 0) result.best_val_f1 = 0.0;
    return result;
}

}  // namespace rgap
