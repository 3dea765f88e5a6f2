#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rgap/parallel.hpp"
#include "rgap/types.hpp"

namespace rgap {

// Inverse-frequency class weights: w1 = N / (2 n1), w0 = N / (2 n0).
struct ClassWeights {
    double w1 = 1.0;
    double w0 = 1.0;
};
ClassWeights inverse_frequency_weights(const std::vector<int>& labels);

class MlpClassifier;
struct MlpTrainConfig;
struct MlpTrainResult;

// AdamW on the weighted binary cross-entropy (mean over the batch), with a
// seeded stratified validation split, per-epoch validation, best-F1
// checkpointing and early stopping. Deterministic given the seed.
MlpTrainResult train_mlp(const std::vector<std::vector<double>>& features,
                         const std::vector<int>& labels, const MlpTrainConfig& config,
                         ParallelMode mode = ParallelMode::Serial);

// Feed-forward binary classifier: input -> [hidden ReLU] -> logit. A hidden
// size of zero makes it a linear probe. The matrix kernels run either on the
// serial reference path or row-parallel under OpenMP; both produce identical
// bits because every output element is computed by exactly one thread.
class MlpClassifier {
  public:
    MlpClassifier() = default;
    MlpClassifier(int input_dim, int hidden_dim, std::uint64_t init_seed);

    int input_dim() const { return input_dim_; }
    int hidden_dim() const { return hidden_dim_; }

    double predict_logit(const std::vector<double>& x, ParallelMode mode) const;
    double predict_proba(const std::vector<double>& x,
                         ParallelMode mode = ParallelMode::Serial) const;
    std::vector<double> predict_proba_batch(const std::vector<std::vector<double>>& xs,
                                            ParallelMode mode) const;

    json to_json() const;
    static MlpClassifier from_json(const json& j);

  private:
    friend MlpTrainResult train_mlp(const std::vector<std::vector<double>>& features,
                                    const std::vector<int>& labels, const MlpTrainConfig& config,
                                    ParallelMode mode);

    int input_dim_ = 0;
    int hidden_dim_ = 0;  // 0 = linear
    std::vector<double> w1_;  // hidden x input
    std::vector<double> b1_;  // hidden
    std::vector<double> w2_;  // hidden (or input when linear)
    double b2_ = 0.0;
};

struct MlpTrainConfig {
    int hidden_dim = 0;
    double learning_rate = 1e-3;
    int batch_size = 16;
    int max_epochs = 50;
    int patience = 5;              // early stop on validation F1
    double validation_fraction = 0.1;  // stratified by label
    double weight_decay = 0.01;
    std::uint64_t seed = 0;
};

struct MlpTrainResult {
    MlpClassifier model;
    double best_val_f1 = 0.0;  // percent
    int best_epoch = -1;
    int epochs_run = 0;
};


}  // namespace rgap
