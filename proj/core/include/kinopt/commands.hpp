#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace kinopt {

// Exit codes shared by all commands:
//   0 success, 2 config error, 3 runtime error or divergence, 4 I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitIo = 4;

// Trains one run per seed (--seed overrides the config's seed list) and
// writes <out>/seed_<s>/{manifest.txt, metrics.csv, similarity_final.csv,
// similarity_epoch_K.csv...}. Outputs are written atomically (temp + rename).
int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed_override,
              const std::string& out_dir, bool quiet);

// Runs the dilute-gas simulation and writes <out>/h_series.csv
// (columns step,time,h,mb_distance,kinetic_energy) plus an optional final
// velocity snapshot.
int cmd_dsmc(const std::string& config_path, const std::string& out_dir, bool quiet);

// Compares two completed run directories with equal epoch counts; writes
// <out>/compare.json (final/mean delta per metric column, b minus a) and
// <out>/metrics_diff.csv (per-epoch differences).
int cmd_compare(const std::string& run_dir_a, const std::string& run_dir_b,
                const std::string& out_dir, bool quiet);

// Times training steps with and without the kinetic transform on the
// workload described by the config ([network]/[optimizer]/[kinetic]/[data];
// batch = n_samples). Writes <out>/bench.json.
int cmd_bench(const std::string& config_path, const std::string& out_dir,
              std::size_t steps, bool quiet);

// Writes content to path via a temp file and rename, creating parent
// directories as needed. Throws IoError on failure.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace kinopt
