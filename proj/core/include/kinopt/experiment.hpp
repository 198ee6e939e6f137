#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kinopt/kinetic.hpp"
#include "kinopt/matrix.hpp"
#include "kinopt/metrics.hpp"
#include "kinopt/net.hpp"
#include "kinopt/optim.hpp"

namespace kinopt {

// Regression target: y = sum_k amplitude * sin(frequency * x_k + phase) with
// each x_k uniform in [range_low, range_high].
struct SyntheticSpec {
    std::size_t n_samples = 80;
    std::size_t input_dim = 5;
    double range_low = -4.0;
    double range_high = 2.0;
    double amplitude = 3.5;
    double frequency = 5.0;
    double phase = 1.0;
    std::uint64_t seed = 1;

    void validate() const;
    bool operator==(const SyntheticSpec&) const = default;
};

struct Dataset {
    Matrix x;  // n x input_dim
    Matrix y;  // n x 1
};

Dataset gen_synthetic(const SyntheticSpec& spec);
double synthetic_target(const SyntheticSpec& spec, std::span<const double> x);

struct ExperimentConfig {
    std::vector<std::size_t> dims = {5, 50, 1};
    Activation activation = Activation::Tanh;
    double init_stddev = 0.005;
    OptimizerConfig optimizer;                 // default Adam, lr 1e-3
    std::optional<KineticConfig> kinetic;      // nullopt = plain base optimizer
    std::vector<std::size_t> target_layers = {0};
    std::size_t epochs = 100;
    std::size_t snapshot_cadence = 0;          // 0 = final snapshot only
    SyntheticSpec data;
    std::uint64_t seed = 1;

    void validate() const;
};

struct RunResult {
    std::vector<MetricsRecord> records;
    Matrix similarity_final;                       // first hidden layer cosine matrix
    std::vector<std::pair<std::size_t, Matrix>> snapshots;  // (epoch, cosine matrix)
    bool diverged = false;
    std::size_t diverged_epoch = 0;                // first epoch with non-finite loss
};

// Full-batch training run on the synthetic task. Records the loss used for
// that epoch's step and the first hidden layer's similarity metrics after the
// step. All randomness derives from cfg.seed via labeled substreams.
RunResult run_condensation(const ExperimentConfig& cfg);

// Training-step timing on an identical workload with and without the kinetic
// transform. Steps are timed individually; the reported figure is the median.
struct BenchSpec {
    std::vector<std::size_t> dims = {5, 50, 1};
    Activation activation = Activation::Tanh;
    std::size_t batch = 80;
    OptimizerConfig optimizer;
    KineticConfig kinetic;
    std::vector<std::size_t> target_layers = {0};
    std::size_t steps = 100;
    std::size_t warmup = 5;
    std::uint64_t seed = 1;
};

struct OverheadResult {
    double base_ms_per_step = 0.0;
    double ko_ms_per_step = 0.0;
    double ratio() const { return ko_ms_per_step / base_ms_per_step; }
};

OverheadResult bench_overhead(const BenchSpec& spec);

}  // namespace kinopt
