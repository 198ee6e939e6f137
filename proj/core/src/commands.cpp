#include "kinopt/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "kinopt/config.hpp"

namespace kinopt {

namespace fs = std::filesystem;

void atomic_write_file(const std::string& path, const std::string& content) {
    try {
        const fs::path target(path);
        if (target.has_parent_path()) fs::create_directories(target.parent_path());
        const fs::path tmp = target.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot open for writing: " + tmp.string());
            out << content;
            if (!out) throw IoError("write failed: " + tmp.string());
        }
        fs::rename(tmp, target);
    } catch (const fs::filesystem_error& e) {
        throw IoError(std::string("filesystem error: ") + e.what());
    }
}

namespace {

std::string matrix_csv_string(const Matrix& m) {
    std::ostringstream out;
    write_csv(m, out);
    return out.str();
}

template <typename Fn>
int guarded(bool quiet, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        if (!quiet) std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        if (!quiet) std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        if (!quiet) std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        if (!quiet) std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

std::vector<MetricsRecord> load_metrics(const std::string& run_dir) {
    const fs::path path = fs::path(run_dir) / "metrics.csv";
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return read_metrics_csv(in);
    } catch (const std::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed_override,
              const std::string& out_dir, bool quiet) {
    return guarded(quiet, [&]() -> int {
        const RunConfig cfg = load_config_file(config_path);
        std::vector<std::uint64_t> seeds =
            seed_override ? std::vector<std::uint64_t>{*seed_override} : cfg.seeds;
        bool any_diverged = false;
        for (const std::uint64_t seed : seeds) {
            const ExperimentConfig exp_cfg = to_experiment_config(cfg, seed);
            exp_cfg.validate();
            const RunResult result = run_condensation(exp_cfg);

            const fs::path run_dir = fs::path(out_dir) / ("seed_" + std::to_string(seed));
            RunConfig manifest_cfg = cfg;
            manifest_cfg.seeds = {seed};
            atomic_write_file((run_dir / "manifest.txt").string(), emit_config(manifest_cfg));

            std::ostringstream metrics;
            write_metrics_csv(result.records, metrics);
            atomic_write_file((run_dir / "metrics.csv").string(), metrics.str());
            atomic_write_file((run_dir / "similarity_final.csv").string(),
                              matrix_csv_string(result.similarity_final));
            for (const auto& [epoch, cos] : result.snapshots) {
                atomic_write_file(
                    (run_dir / ("similarity_epoch_" + std::to_string(epoch) + ".csv")).string(),
                    matrix_csv_string(cos));
            }
            if (result.diverged) {
                atomic_write_file((run_dir / "diverged.txt").string(),
                                  "loss became non-finite at epoch " +
                                      std::to_string(result.diverged_epoch) + "\n");
                if (!quiet) {
                    std::cerr << "seed " << seed << ": diverged at epoch "
                              << result.diverged_epoch << '\n';
                }
                any_diverged = true;
                continue;
            }
            if (!quiet) {
                const auto& last = result.records.back();
                std::cout << "seed " << seed << ": loss " << format_double(last.train_loss)
                          << "  neuron_similarity " << format_double(last.neuron_similarity)
                          << "  weight_correlation " << format_double(last.weight_correlation)
                          << '\n';
            }
        }
        return any_diverged ? kExitRuntime : kExitOk;
    });
}

int cmd_dsmc(const std::string& config_path, const std::string& out_dir, bool quiet) {
    return guarded(quiet, [&]() -> int {
        const RunConfig cfg = load_config_file(config_path);
        cfg.dsmc.validate();
        const DsmcRunResult result = run_dsmc(cfg.dsmc);

        std::ostringstream csv;
        csv << "step,time,h,mb_distance,kinetic_energy\n";
        for (const auto& rec : result.records) {
            csv << rec.step << ',' << format_double(rec.time) << ',' << format_double(rec.h)
                << ',' << format_double(rec.mb) << ',' << format_double(rec.kinetic_energy)
                << '\n';
        }
        atomic_write_file((fs::path(out_dir) / "h_series.csv").string(), csv.str());
        if (cfg.dsmc_save_velocities) {
            atomic_write_file((fs::path(out_dir) / "velocities_final.csv").string(),
                              matrix_csv_string(result.system.velocities_matrix()));
        }
        if (!quiet && !result.records.empty()) {
            const auto& last = result.records.back();
            std::cout << "steps " << result.records.size() << "  final h "
                      << format_double(last.h) << "  final mb_distance "
                      << format_double(last.mb) << "  kinetic energy "
                      << format_double(last.kinetic_energy) << '\n';
        }
        return kExitOk;
    });
}

int cmd_compare(const std::string& run_dir_a, const std::string& run_dir_b,
                const std::string& out_dir, bool quiet) {
    return guarded(quiet, [&]() -> int {
        const auto a = load_metrics(run_dir_a);
        const auto b = load_metrics(run_dir_b);
        if (a.size() != b.size()) {
            throw ConfigError("mismatched epoch counts: " + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()));
        }
        if (a.empty()) throw ConfigError("runs contain no epochs");

        struct Column {
            const char* name;
            double (*get)(const MetricsRecord&);
        };
        const Column columns[] = {
            {"train_loss", [](const MetricsRecord& r) { return r.train_loss; }},
            {"neuron_similarity", [](const MetricsRecord& r) { return r.neuron_similarity; }},
            {"weight_correlation", [](const MetricsRecord& r) { return r.weight_correlation; }},
            {"step_time_ms", [](const MetricsRecord& r) { return r.step_time_ms; }},
        };

        nlohmann::json j;
        j["run_a"] = run_dir_a;
        j["run_b"] = run_dir_b;
        j["epochs"] = a.size();
        for (const auto& col : columns) {
            double mean_a = 0.0, mean_b = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                mean_a += col.get(a[i]);
                mean_b += col.get(b[i]);
            }
            mean_a /= static_cast<double>(a.size());
            mean_b /= static_cast<double>(b.size());
            j[std::string(col.name) + "_final_delta"] = col.get(b.back()) - col.get(a.back());
            j[std::string(col.name) + "_mean_delta"] = mean_b - mean_a;
        }

        std::ostringstream diff;
        diff << "epoch,train_loss_delta,neuron_similarity_delta,"
                "weight_correlation_delta,step_time_ms_delta\n";
        for (std::size_t i = 0; i < a.size(); ++i) {
            diff << a[i].epoch;
            for (const auto& col : columns) {
                diff << ',' << format_double(col.get(b[i]) - col.get(a[i]));
            }
            diff << '\n';
        }

        atomic_write_file((fs::path(out_dir) / "compare.json").string(), j.dump(2) + "\n");
        atomic_write_file((fs::path(out_dir) / "metrics_diff.csv").string(), diff.str());
        if (!quiet) {
            std::cout << "weight_correlation_final_delta "
                      << format_double(j["weight_correlation_final_delta"].get<double>())
                      << '\n';
        }
        return kExitOk;
    });
}

int cmd_bench(const std::string& config_path, const std::string& out_dir,
              std::size_t steps, bool quiet) {
    return guarded(quiet, [&]() -> int {
        const RunConfig cfg = load_config_file(config_path);
        BenchSpec spec;
        spec.dims = cfg.dims;
        spec.activation = cfg.activation;
        spec.batch = cfg.data.n_samples;
        spec.optimizer = cfg.optimizer;
        spec.kinetic = cfg.kinetic;
        if (!cfg.kinetic_enabled) spec.kinetic.coll_coef = 0.0;
        spec.target_layers = cfg.target_layers;
        if (steps > 0) spec.steps = steps;
        const OverheadResult result = bench_overhead(spec);

        nlohmann::json j;
        j["base_ms_per_step"] = result.base_ms_per_step;
        j["ko_ms_per_step"] = result.ko_ms_per_step;
        j["ratio"] = result.ratio();
        j["steps"] = spec.steps;
        atomic_write_file((fs::path(out_dir) / "bench.json").string(), j.dump(2) + "\n");
        if (!quiet) {
            std::cout << "base " << result.base_ms_per_step << " ms/step,  ko "
                      << result.ko_ms_per_step << " ms/step,  ratio " << result.ratio()
                      << '\n';
        }
        return kExitOk;
    });
}

}  // namespace kinopt
