#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kinopt/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"kinetics-inspired optimizer experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    bool quiet = false;
    std::optional<std::uint64_t> seed;
    std::size_t bench_steps = 100;
    std::string compare_a, compare_b;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config) {
            cmd->add_option("--config", config_path, "config file path")->required();
        }
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_flag("--quiet", quiet, "suppress console output");
    };

    CLI::App* train = app.add_subcommand("train", "run the condensation experiment");
    add_common(train, true);
    train->add_option("--seed", seed, "override the config seed list with one seed");

    CLI::App* dsmc = app.add_subcommand("dsmc", "run the dilute-gas simulation");
    add_common(dsmc, true);

    CLI::App* compare = app.add_subcommand("compare", "diff two completed run directories");
    compare->add_option("run_dir_a", compare_a, "baseline run directory")->required();
    compare->add_option("run_dir_b", compare_b, "comparison run directory")->required();
    add_common(compare, false);

    CLI::App* bench = app.add_subcommand("bench", "time base vs kinetic training steps");
    add_common(bench, true);
    bench->add_option("--steps", bench_steps, "measured steps per side");

    CLI11_PARSE(app, argc, argv);

    if (train->parsed()) return kinopt::cmd_train(config_path, seed, out_dir, quiet);
    if (dsmc->parsed()) return kinopt::cmd_dsmc(config_path, out_dir, quiet);
    if (compare->parsed()) return kinopt::cmd_compare(compare_a, compare_b, out_dir, quiet);
    if (bench->parsed()) return kinopt::cmd_bench(config_path, out_dir, bench_steps, quiet);
    return 1;
}
