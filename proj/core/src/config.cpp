#include "kinopt/config.hpp"

#include <fstream>
#include <sstream>

namespace kinopt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

[[noreturn]] void bad_value(const std::string& where, const std::string& value) {
    throw ConfigError(where + ": invalid value '" + value + "'");
}

double to_double(const std::string& where, const std::string& v) {
    try {
        return parse_double(v);
    } catch (const std::exception&) {
        bad_value(where, v);
    }
}

std::size_t to_count(const std::string& where, const std::string& v) {
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-') bad_value(where, v);
        const auto r = std::stoull(v, &pos);
        if (pos != v.size()) bad_value(where, v);
        return r;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(where, v);
    }
}

std::uint64_t to_u64(const std::string& where, const std::string& v) {
    return to_count(where, v);
}

bool to_bool(const std::string& where, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    bad_value(where, v);
}

std::vector<std::size_t> to_count_list(const std::string& where, const std::string& v, char sep) {
    std::vector<std::size_t> out;
    for (const auto& item : split(v, sep)) out.push_back(to_count(where, item));
    if (out.empty()) bad_value(where, v);
    return out;
}

std::string join_counts(const std::vector<std::size_t>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(v[i]);
    }
    return out;
}

std::string join_u64(const std::vector<std::uint64_t>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(v[i]);
    }
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            }
            section = line.substr(1, line.size() - 2);
            if (section != "network" && section != "optimizer" && section != "kinetic" &&
                section != "data" && section != "run" && section != "dsmc") {
                throw ConfigError("[" + section + "]: unknown section");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        if (section.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string where = "[" + section + "] " + key;

        if (section == "network") {
            if (key == "dims") cfg.dims = to_count_list(where, value, '-');
            else if (key == "activation") {
                try { cfg.activation = activation_from_name(value); }
                catch (const std::exception&) { bad_value(where, value); }
            }
            else if (key == "init_stddev") cfg.init_stddev = to_double(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "optimizer") {
            if (key == "kind") {
                try { cfg.optimizer.kind = optimizer_from_name(value); }
                catch (const std::exception&) { bad_value(where, value); }
            }
            else if (key == "learning_rate") cfg.optimizer.learning_rate = to_double(where, value);
            else if (key == "momentum") cfg.optimizer.momentum = to_double(where, value);
            else if (key == "weight_decay") cfg.optimizer.weight_decay = to_double(where, value);
            else if (key == "beta1") cfg.optimizer.beta1 = to_double(where, value);
            else if (key == "beta2") cfg.optimizer.beta2 = to_double(where, value);
            else if (key == "epsilon") cfg.optimizer.epsilon = to_double(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "kinetic") {
            if (key == "enabled") cfg.kinetic_enabled = to_bool(where, value);
            else if (key == "mode") {
                if (value == "hard") cfg.kinetic.mode = CollisionMode::Hard;
                else if (value == "soft") cfg.kinetic.mode = CollisionMode::Soft;
                else bad_value(where, value);
            }
            else if (key == "coll_coef") cfg.kinetic.coll_coef = to_double(where, value);
            else if (key == "soft_zero_diagonal") cfg.kinetic.soft_zero_diagonal = to_bool(where, value);
            else if (key == "hard_max_one_collision_per_neuron")
                cfg.kinetic.hard_max_one_collision_per_neuron = to_bool(where, value);
            else if (key == "target_layers") cfg.target_layers = to_count_list(where, value, ',');
            else if (key == "rng_label") cfg.kinetic.rng_stream_label = value;
            else throw ConfigError(where + ": unknown key");
        } else if (section == "data") {
            if (key == "n_samples") cfg.data.n_samples = to_count(where, value);
            else if (key == "input_dim") cfg.data.input_dim = to_count(where, value);
            else if (key == "range_low") cfg.data.range_low = to_double(where, value);
            else if (key == "range_high") cfg.data.range_high = to_double(where, value);
            else if (key == "amplitude") cfg.data.amplitude = to_double(where, value);
            else if (key == "frequency") cfg.data.frequency = to_double(where, value);
            else if (key == "phase") cfg.data.phase = to_double(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "run") {
            if (key == "epochs") cfg.epochs = to_count(where, value);
            else if (key == "seeds") {
                cfg.seeds.clear();
                for (const auto& item : split(value, ',')) {
                    cfg.seeds.push_back(to_u64(where, item));
                }
                if (cfg.seeds.empty()) bad_value(where, value);
            }
            else if (key == "snapshot_cadence") cfg.snapshot_cadence = to_count(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "dsmc") {
            if (key == "n_particles") cfg.dsmc.n_particles = to_count(where, value);
            else if (key == "fn") cfg.dsmc.fn = to_double(where, value);
            else if (key == "diameter") cfg.dsmc.diameter = to_double(where, value);
            else if (key == "tau") cfg.dsmc.tau = to_double(where, value);
            else if (key == "box") {
                const auto parts = split(value, ',');
                if (parts.size() != 3) bad_value(where, value);
                for (int a = 0; a < 3; ++a) cfg.dsmc.box[a] = to_double(where, parts[a]);
            }
            else if (key == "cells") {
                const auto parts = to_count_list(where, value, ',');
                if (parts.size() != 3) bad_value(where, value);
                for (int a = 0; a < 3; ++a) cfg.dsmc.cells[a] = parts[a];
            }
            else if (key == "mass") cfg.dsmc.mass = to_double(where, value);
            else if (key == "kb_t") cfg.dsmc.kb_t = to_double(where, value);
            else if (key == "seed") cfg.dsmc.seed = to_u64(where, value);
            else if (key == "n_steps") cfg.dsmc.n_steps = to_count(where, value);
            else if (key == "equal_speed_start") cfg.dsmc.equal_speed_start = to_bool(where, value);
            else if (key == "hist_bins") cfg.dsmc.hist_bins = to_count(where, value);
            else if (key == "vrmax_init") cfg.dsmc.vrmax_init = to_double(where, value);
            else if (key == "save_velocities") cfg.dsmc_save_velocities = to_bool(where, value);
            else throw ConfigError(where + ": unknown key");
        }
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string emit_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[network]\n";
    out << "dims = " << join_counts(cfg.dims, '-') << '\n';
    out << "activation = " << activation_name(cfg.activation) << '\n';
    out << "init_stddev = " << format_double(cfg.init_stddev) << '\n';
    out << "\n[optimizer]\n";
    out << "kind = " << optimizer_name(cfg.optimizer.kind) << '\n';
    out << "learning_rate = " << format_double(cfg.optimizer.learning_rate) << '\n';
    out << "momentum = " << format_double(cfg.optimizer.momentum) << '\n';
    out << "weight_decay = " << format_double(cfg.optimizer.weight_decay) << '\n';
    out << "beta1 = " << format_double(cfg.optimizer.beta1) << '\n';
    out << "beta2 = " << format_double(cfg.optimizer.beta2) << '\n';
    out << "epsilon = " << format_double(cfg.optimizer.epsilon) << '\n';
    out << "\n[kinetic]\n";
    out << "enabled = " << (cfg.kinetic_enabled ? "true" : "false") << '\n';
    out << "mode = " << (cfg.kinetic.mode == CollisionMode::Hard ? "hard" : "soft") << '\n';
    out << "coll_coef = " << format_double(cfg.kinetic.coll_coef) << '\n';
    out << "soft_zero_diagonal = " << (cfg.kinetic.soft_zero_diagonal ? "true" : "false") << '\n';
    out << "hard_max_one_collision_per_neuron = "
        << (cfg.kinetic.hard_max_one_collision_per_neuron ? "true" : "false") << '\n';
    out << "target_layers = " << join_counts(cfg.target_layers, ',') << '\n';
    out << "rng_label = " << cfg.kinetic.rng_stream_label << '\n';
    out << "\n[data]\n";
    out << "n_samples = " << cfg.data.n_samples << '\n';
    out << "input_dim = " << cfg.data.input_dim << '\n';
    out << "range_low = " << format_double(cfg.data.range_low) << '\n';
    out << "range_high = " << format_double(cfg.data.range_high) << '\n';
    out << "amplitude = " << format_double(cfg.data.amplitude) << '\n';
    out << "frequency = " << format_double(cfg.data.frequency) << '\n';
    out << "phase = " << format_double(cfg.data.phase) << '\n';
    out << "\n[run]\n";
    out << "epochs = " << cfg.epochs << '\n';
    out << "seeds = " << join_u64(cfg.seeds, ',') << '\n';
    out << "snapshot_cadence = " << cfg.snapshot_cadence << '\n';
    out << "\n[dsmc]\n";
    out << "n_particles = " << cfg.dsmc.n_particles << '\n';
    out << "fn = " << format_double(cfg.dsmc.fn) << '\n';
    out << "diameter = " << format_double(cfg.dsmc.diameter) << '\n';
    out << "tau = " << format_double(cfg.dsmc.tau) << '\n';
    out << "box = " << format_double(cfg.dsmc.box[0]) << ',' << format_double(cfg.dsmc.box[1])
        << ',' << format_double(cfg.dsmc.box[2]) << '\n';
    out << "cells = " << cfg.dsmc.cells[0] << ',' << cfg.dsmc.cells[1] << ','
        << cfg.dsmc.cells[2] << '\n';
    out << "mass = " << format_double(cfg.dsmc.mass) << '\n';
    out << "kb_t = " << format_double(cfg.dsmc.kb_t) << '\n';
    out << "seed = " << cfg.dsmc.seed << '\n';
    out << "n_steps = " << cfg.dsmc.n_steps << '\n';
    out << "equal_speed_start = " << (cfg.dsmc.equal_speed_start ? "true" : "false") << '\n';
    out << "hist_bins = " << cfg.dsmc.hist_bins << '\n';
    out << "vrmax_init = " << format_double(cfg.dsmc.vrmax_init) << '\n';
    out << "save_velocities = " << (cfg.dsmc_save_velocities ? "true" : "false") << '\n';
    return out.str();
}

ExperimentConfig to_experiment_config(const RunConfig& cfg, std::uint64_t seed) {
    ExperimentConfig exp;
    exp.dims = cfg.dims;
    exp.activation = cfg.activation;
    exp.init_stddev = cfg.init_stddev;
    exp.optimizer = cfg.optimizer;
    if (cfg.kinetic_enabled) exp.kinetic = cfg.kinetic;
    exp.target_layers = cfg.target_layers;
    exp.epochs = cfg.epochs;
    exp.snapshot_cadence = cfg.snapshot_cadence;
    exp.data = cfg.data;
    exp.seed = seed;
    return exp;
}

}  // namespace kinopt
