#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinopt/dsmc.hpp"
#include "kinopt/experiment.hpp"
#include "kinopt/kinetic.hpp"
#include "kinopt/net.hpp"
#include "kinopt/optim.hpp"

namespace kinopt {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat INI-style run configuration. Every key has a default; unknown sections
// or keys are rejected with a message naming them. parse_config(emit_config(c))
// reproduces c exactly (doubles are emitted with 17 significant digits).
struct RunConfig {
    // [network]
    std::vector<std::size_t> dims = {5, 50, 1};
    Activation activation = Activation::Tanh;
    double init_stddev = 0.005;
    // [optimizer]
    OptimizerConfig optimizer;
    // [kinetic]
    bool kinetic_enabled = false;
    KineticConfig kinetic;
    std::vector<std::size_t> target_layers = {0};
    // [data]
    SyntheticSpec data;  // the seed field is not a config key; runs derive it
    // [run]
    std::size_t epochs = 100;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::size_t snapshot_cadence = 0;
    // [dsmc]
    DsmcConfig dsmc;
    bool dsmc_save_velocities = false;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);       // throws ConfigError
RunConfig load_config_file(const std::string& path);   // throws IoError / ConfigError
std::string emit_config(const RunConfig& cfg);

// Experiment view of the config for one concrete seed.
ExperimentConfig to_experiment_config(const RunConfig& cfg, std::uint64_t seed);

}  // namespace kinopt
