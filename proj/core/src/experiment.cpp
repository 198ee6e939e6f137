#include "kinopt/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace kinopt {

void SyntheticSpec::validate() const {
    if (n_samples == 0) throw std::invalid_argument("n_samples must be >= 1");
    if (input_dim == 0) throw std::invalid_argument("input_dim must be >= 1");
    if (!(range_low < range_high)) throw std::invalid_argument("range_low must be < range_high");
}

double synthetic_target(const SyntheticSpec& spec, std::span<const double> x) {
    double y = 0.0;
    for (double v : x) y += spec.amplitude * std::sin(spec.frequency * v + spec.phase);
    return y;
}

Dataset gen_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng = Rng(spec.seed).substream("synthetic-data");
    Dataset ds{Matrix(spec.n_samples, spec.input_dim), Matrix(spec.n_samples, 1)};
    for (std::size_t i = 0; i < spec.n_samples; ++i) {
        for (std::size_t k = 0; k < spec.input_dim; ++k) {
            ds.x(i, k) = rng.uniform(spec.range_low, spec.range_high);
        }
        ds.y(i, 0) = synthetic_target(spec, ds.x.row(i));
    }
    return ds;
}

void ExperimentConfig::validate() const {
    if (dims.size() < 2) throw std::invalid_argument("dims must list input and output");
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("dims entries must be >= 1");
    }
    if (epochs == 0) throw std::invalid_argument("epochs must be >= 1");
    if (!(init_stddev >= 0.0)) throw std::invalid_argument("init_stddev must be >= 0");
    optimizer.validate();
    if (kinetic) kinetic->validate();
    const std::size_t n_layers = dims.size() - 1;
    for (std::size_t l : target_layers) {
        if (l >= n_layers) throw std::invalid_argument("target_layers index out of range");
    }
    data.validate();
    if (data.input_dim != dims.front()) {
        throw std::invalid_argument("data input_dim must match first network dim");
    }
    if (dims.back() != 1) {
        throw std::invalid_argument("synthetic task requires output dim 1");
    }
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point t0,
                  std::chrono::steady_clock::time_point t1) {
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

RunResult run_condensation(const ExperimentConfig& cfg) {
    cfg.validate();
    Rng master(cfg.seed);

    SyntheticSpec data_spec = cfg.data;
    data_spec.seed = cfg.seed;
    const Dataset ds = gen_synthetic(data_spec);

    Rng init_rng = master.substream("net-init");
    Network net = Network::mlp(cfg.dims, cfg.activation, init_rng, cfg.init_stddev);

    Optimizer base(cfg.optimizer);
    std::optional<KineticOptimizer> ko;
    if (cfg.kinetic) {
        ko.emplace(cfg.optimizer, *cfg.kinetic, cfg.target_layers, master);
    }

    RunResult result;
    result.records.reserve(cfg.epochs);
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const Matrix pred = net.forward(ds.x);
        const LossResult loss = mse_loss(pred, ds.y);
        if (!std::isfinite(loss.value)) {
            result.diverged = true;
            result.diverged_epoch = epoch;
            break;
        }
        net.backward(loss.grad);
        if (ko) {
            ko->step(net);
        } else {
            base.step(net);
        }
        const auto t1 = std::chrono::steady_clock::now();

        const Matrix cos = cosine_matrix(net.layers().front().weight);
        MetricsRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss.value;
        rec.val_metric = loss.value;
        rec.neuron_similarity = neuron_similarity(cos);
        rec.weight_correlation = weight_correlation(cos);
        rec.step_time_ms = elapsed_ms(t0, t1);
        result.records.push_back(rec);

        if (cfg.snapshot_cadence > 0 && epoch % cfg.snapshot_cadence == 0 &&
            epoch != cfg.epochs) {
            result.snapshots.emplace_back(epoch, cos);
        }
        if (epoch == cfg.epochs) {
            result.similarity_final = cos;
        }
    }
    if (result.diverged) {
        result.similarity_final = cosine_matrix(net.layers().front().weight);
    }
    return result;
}

OverheadResult bench_overhead(const BenchSpec& spec) {
    if (spec.steps == 0) throw std::invalid_argument("bench: steps must be >= 1");
    if (spec.batch == 0) throw std::invalid_argument("bench: batch must be >= 1");
    spec.optimizer.validate();
    spec.kinetic.validate();

    Rng master(spec.seed);
    Rng data_rng = master.substream("bench-data");
    Matrix x = gaussian_init(data_rng, spec.batch, spec.dims.front(), 1.0);
    Matrix y = gaussian_init(data_rng, spec.batch, spec.dims.back(), 1.0);

    auto run_side = [&](bool with_kinetic) {
        Rng init_rng = master.substream("net-init");
        Network net = Network::mlp(spec.dims, spec.activation, init_rng, 0.05);
        Optimizer base(spec.optimizer);
        std::optional<KineticOptimizer> ko;
        if (with_kinetic) {
            ko.emplace(spec.optimizer, spec.kinetic, spec.target_layers, master);
        }
        auto one_step = [&] {
            const Matrix pred = net.forward(x);
            const LossResult loss = mse_loss(pred, y);
            net.backward(loss.grad);
            if (ko) {
                ko->step(net);
            } else {
                base.step(net);
            }
        };
        for (std::size_t i = 0; i < spec.warmup; ++i) one_step();
        std::vector<double> times;
        times.reserve(spec.steps);
        for (std::size_t i = 0; i < spec.steps; ++i) {
            const auto t0 = std::chrono::steady_clock::now();
            one_step();
            const auto t1 = std::chrono::steady_clock::now();
            times.push_back(elapsed_ms(t0, t1));
        }
        std::sort(times.begin(), times.end());
        const std::size_t mid = times.size() / 2;
        return times.size() % 2 == 1 ? times[mid]
                                     : 0.5 * (times[mid - 1] + times[mid]);
    };

    OverheadResult result;
    result.base_ms_per_step = run_side(false);
    result.ko_ms_per_step = run_side(true);
    return result;
}

}  // namespace kinopt
