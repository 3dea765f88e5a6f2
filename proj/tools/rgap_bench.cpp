// Benchmarks the OpenMP kernels against the serial reference implementation
// and verifies that both paths produce identical bits.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "rgap/classifiers.hpp"
#include "rgap/detection.hpp"
#include "rgap/mlp.hpp"
#include "rgap/parallel.hpp"

using namespace rgap;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

TopkMatrix synthetic_topk(std::mt19937_64& rng, std::size_t rows, std::size_t width) {
    TopkMatrix m;
    m.width = width;
    m.entries.resize(rows * width);
    std::uniform_real_distribution<double> logp(-12.0, -0.1);
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<double> row(width);
        for (auto& v : row) v = logp(rng);
        std::sort(row.begin(), row.end(), std::greater<>());
        for (std::size_t c = 0; c < width; ++c)
            m.entries[r * width + c] = {static_cast<std::int32_t>(c), row[c]};
    }
    return m;
}

template <typename Fn>
double time_best_of(int repeats, Fn&& fn) {
    double best = 1e18;
    for (int r = 0; r < repeats; ++r) {
        auto start = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, seconds_since(start));
    }
    return best;
}

}  // namespace

int main() {
    std::printf("workers available: %d\n\n", parallel_worker_count());
    std::mt19937_64 rng(7);

    // Kernel 1: per-record confidence extraction.
    {
        constexpr std::size_t kRecords = 512, kRows = 512, kWidth = 20;
        std::vector<TopkMatrix> records;
        records.reserve(kRecords);
        for (std::size_t i = 0; i < kRecords; ++i)
            records.push_back(synthetic_topk(rng, kRows, kWidth));

        std::vector<double> serial_out(kRecords), parallel_out(kRecords);
        auto run = [&](ParallelMode mode, std::vector<double>& out) {
            parallel_for(kRecords, mode,
                         [&](std::size_t i) { out[i] = token_confidence(records[i]).avg; });
        };
        double t_serial = time_best_of(3, [&] { run(ParallelMode::Serial, serial_out); });
        double t_parallel = time_best_of(3, [&] { run(ParallelMode::OpenMP, parallel_out); });
        bool identical = serial_out == parallel_out;
        std::printf("confidence extraction  serial %.4fs  openmp %.4fs  speedup %.2fx  %s\n",
                    t_serial, t_parallel, t_serial / t_parallel,
                    identical ? "bit-identical" : "MISMATCH");
    }

    // Kernel 2: prober forward pass over a batch of hidden states.
    {
        constexpr int kDim = 2048, kHidden = 1024;
        constexpr std::size_t kBatch = 256;
        MlpClassifier model(kDim, kHidden, 11);
        std::vector<std::vector<double>> xs(kBatch, std::vector<double>(kDim));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (auto& x : xs)
            for (auto& v : x) v = unit(rng);

        std::vector<double> serial_out, parallel_out;
        double t_serial =
            time_best_of(3, [&] { serial_out = model.predict_proba_batch(xs, ParallelMode::Serial); });
        double t_parallel = time_best_of(
            3, [&] { parallel_out = model.predict_proba_batch(xs, ParallelMode::OpenMP); });
        bool identical = serial_out == parallel_out;
        std::printf("prober forward pass    serial %.4fs  openmp %.4fs  speedup %.2fx  %s\n",
                    t_serial, t_parallel, t_serial / t_parallel,
                    identical ? "bit-identical" : "MISMATCH");
    }

    // Kernel 3: detector training grid (independent configurations).
    {
        constexpr int kDim = 64;
        constexpr std::size_t kSamples = 256;
        std::vector<VectorInstance> data(kSamples);
        std::normal_distribution<double> noise(0.0, 0.3);
        for (std::size_t i = 0; i < kSamples; ++i) {
            data[i].label = i % 4 == 0 ? 1 : 0;
            data[i].features.resize(kDim);
            for (auto& v : data[i].features) v = noise(rng);
            data[i].features[0] += data[i].label == 1 ? 1.0 : -1.0;
        }
        ProberHp hp;
        hp.max_epochs = 6;
        TrainedDetector serial_d, parallel_d;
        double t_serial =
            time_best_of(1, [&] { serial_d = train_prober(data, hp, ParallelMode::Serial); });
        double t_parallel =
            time_best_of(1, [&] { parallel_d = train_prober(data, hp, ParallelMode::OpenMP); });
        bool identical =
            serial_d.model.to_json() == parallel_d.model.to_json() &&
            serial_d.hyperparameters == parallel_d.hyperparameters;
        std::printf("prober training grid   serial %.4fs  openmp %.4fs  speedup %.2fx  %s\n",
                    t_serial, t_parallel, t_serial / t_parallel,
                    identical ? "bit-identical" : "MISMATCH");
    }

    return 0;
}
