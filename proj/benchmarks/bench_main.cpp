#include <benchmark/benchmark.h>

#include "kinopt/dsmc.hpp"
#include "kinopt/experiment.hpp"
#include "kinopt/kinetic.hpp"
#include "kinopt/metrics.hpp"

namespace {

using namespace kinopt;

void BM_matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(7);
    const Matrix a = gaussian_init(rng, n, n, 1.0);
    const Matrix b = gaussian_init(rng, n, n, 1.0);
    for (auto _ : state) {
        Matrix c = matmul(a, b);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n * n));
}
BENCHMARK(BM_matmul)->Arg(128)->Arg(256)->Arg(512);

void BM_cosine_matrix(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(7);
    const Matrix w = gaussian_init(rng, n, 2 * n, 1.0);
    for (auto _ : state) {
        Matrix c = cosine_matrix(w);
        benchmark::DoNotOptimize(c.data());
    }
}
BENCHMARK(BM_cosine_matrix)->Arg(50)->Arg(256)->Arg(512);

void BM_soft_collision(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = static_cast<std::size_t>(state.range(1));
    Rng rng(7);
    const Matrix w = gaussian_init(rng, n, d, 1.0);
    const Matrix g = gaussian_init(rng, n, d, 1.0);
    KineticConfig cfg;
    cfg.mode = CollisionMode::Soft;
    cfg.coll_coef = 0.1;
    for (auto _ : state) {
        Matrix out = soft_collision(w, g, cfg);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_soft_collision)->Args({50, 5})->Args({512, 1024});

void BM_hard_collision(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = static_cast<std::size_t>(state.range(1));
    Rng rng(7);
    const Matrix w = gaussian_init(rng, n, d, 1.0);
    const Matrix g = gaussian_init(rng, n, d, 1.0);
    KineticConfig cfg;
    cfg.mode = CollisionMode::Hard;
    cfg.coll_coef = 0.1;
    Rng draw(11);
    for (auto _ : state) {
        Matrix out = hard_collision(w, g, cfg, draw);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_hard_collision)->Args({50, 5})->Args({512, 64});

void BM_train_step(benchmark::State& state) {
    const bool with_kinetic = state.range(0) != 0;
    BenchSpec spec;
    spec.dims = {5, 50, 1};
    spec.batch = 80;
    spec.kinetic.mode = CollisionMode::Soft;
    spec.kinetic.coll_coef = with_kinetic ? 0.1 : 0.0;
    spec.steps = 1;
    spec.warmup = 0;

    Rng master(spec.seed);
    Rng data_rng = master.substream("bench-data");
    const Matrix x = gaussian_init(data_rng, spec.batch, spec.dims.front(), 1.0);
    const Matrix y = gaussian_init(data_rng, spec.batch, spec.dims.back(), 1.0);
    Rng init_rng = master.substream("net-init");
    Network net = Network::mlp(spec.dims, spec.activation, init_rng, 0.05);
    KineticOptimizer opt(spec.optimizer, spec.kinetic, spec.target_layers, master);
    for (auto _ : state) {
        const Matrix pred = net.forward(x);
        const LossResult loss = mse_loss(pred, y);
        net.backward(loss.grad);
        opt.step(net);
        benchmark::DoNotOptimize(net.layers().front().weight.data());
    }
}
BENCHMARK(BM_train_step)->Arg(0)->Arg(1);

void BM_dsmc_step(benchmark::State& state) {
    DsmcConfig cfg;
    cfg.n_particles = static_cast<std::size_t>(state.range(0));
    cfg.n_steps = 1;
    Rng init(cfg.seed);
    ParticleSystem sys(cfg, init);
    Rng coll(99);
    for (auto _ : state) {
        sys.drift(cfg.tau);
        sys.reflect_walls();
        sys.rebuild_cells();
        const CollideStats stats = sys.collide(coll);
        benchmark::DoNotOptimize(stats.accepted);
    }
}
BENCHMARK(BM_dsmc_step)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
