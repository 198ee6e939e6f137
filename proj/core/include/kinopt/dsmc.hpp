#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kinopt/matrix.hpp"
#include "kinopt/rng.hpp"

namespace kinopt {

// All quantities are non-dimensional; defaults use mass = k_B = 1.
struct DsmcConfig {
    std::size_t n_particles = 10000;
    double fn = 5.0;          // physical molecules per simulation particle
    double diameter = 0.01;   // hard-sphere diameter
    double tau = 0.01;        // time step
    std::array<double, 3> box = {1.0, 1.0, 1.0};
    std::array<std::size_t, 3> cells = {5, 5, 5};
    double mass = 1.0;
    double kb_t = 1.0;        // initial temperature scale (k_B * T)
    std::uint64_t seed = 1;
    std::size_t n_steps = 2000;
    // Non-equilibrium start for relaxation demos: every particle has speed
    // sqrt(3 kb_t / mass) (same kinetic energy as the equilibrium start) in a
    // uniformly random direction. Default is a Maxwell-Boltzmann start.
    bool equal_speed_start = false;
    std::size_t hist_bins = 50;
    // Initial per-cell maximum-relative-speed estimate; 0 selects the
    // automatic value 3 * sqrt(6 kb_t / mass). Overestimation only wastes
    // candidates.
    double vrmax_init = 0.0;

    void validate() const;  // throws std::invalid_argument naming the field
    bool operator==(const DsmcConfig&) const = default;
    double cell_volume() const;
    std::size_t cell_count() const { return cells[0] * cells[1] * cells[2]; }
    double thermal_speed() const;   // sqrt(3 kb_t / mass)
    double resolved_vrmax() const;
    double histogram_vmax() const;  // fixed speed-histogram range
};

struct CollideStats {
    std::size_t candidates = 0;           // pairs actually tested
    std::size_t accepted = 0;             // collisions performed
    double expected_candidates = 0.0;     // sum of per-cell candidate counts
                                          // before stochastic rounding
};

class ParticleSystem {
public:
    ParticleSystem(const DsmcConfig& cfg, Rng& rng);

    std::size_t size() const { return cfg_.n_particles; }
    const DsmcConfig& config() const { return cfg_; }

    std::span<const double> positions() const { return pos_; }
    std::span<const double> velocities() const { return vel_; }
    std::span<double> velocities_mut() { return vel_; }

    // Straight-line move: x <- x + v * tau. No wall handling.
    void drift(double tau);
    // Specular reflection: out-of-box coordinates are mirrored about the wall
    // plane and the corresponding velocity component is negated, repeated
    // until the particle is inside. Preserves |v| exactly.
    void reflect_walls();
    void rebuild_cells();

    // No-time-counter collision pass over all cells in index order. Candidate
    // counts use the per-cell running maximum relative speed; fractional
    // counts are rounded stochastically. Accepted pairs scatter isotropically
    // with exact pair momentum and kinetic-energy conservation.
    CollideStats collide(Rng& rng);

    double total_kinetic_energy() const;
    std::array<double, 3> total_momentum() const;
    std::vector<double> speeds() const;

    std::size_t cell_count() const { return cfg_.cell_count(); }
    std::size_t cell_occupancy(std::size_t cell) const;
    const std::vector<double>& cell_vrmax() const { return vrmax_; }

    Matrix velocities_matrix() const;  // n x 3 snapshot

private:
    DsmcConfig cfg_;
    std::vector<double> pos_;
    std::vector<double> vel_;
    std::vector<std::uint32_t> cell_start_;  // CSR offsets, cell_count()+1
    std::vector<std::uint32_t> cell_items_;  // particle ids grouped by cell
    std::vector<double> vrmax_;
};

// Speed histogram over [0, hi) with uniform bins; samples at or beyond hi are
// clamped into the last bin so the density always integrates to 1.
struct VelocityHistogram {
    std::vector<double> edges;    // bins + 1, ascending
    std::vector<double> density;  // bins entries, integrates to 1
};

VelocityHistogram speed_histogram(std::span<const double> speeds, double hi,
                                  std::size_t bins);

// Sum over bins of f * log(f) * width, with 0 log 0 = 0. Throws
// std::invalid_argument when the density does not integrate to 1 within 1e-9.
double h_function(const VelocityHistogram& hist);

// Maxwell-Boltzmann speed CDF for temperature parameter a2 = k_B T / m.
double maxwell_speed_cdf(double speed, double a2);

// Kolmogorov-Smirnov distance between the empirical speed distribution and
// the Maxwell-Boltzmann law at the temperature implied by the current mean
// kinetic energy. Requires at least 1000 samples.
double mb_distance(std::span<const double> speeds, double mass);
double mb_distance(const ParticleSystem& sys);

struct DsmcStepRecord {
    std::size_t step = 0;
    double time = 0.0;
    double h = 0.0;
    double mb = 0.0;  // NaN when the system is too small for the KS test
    double kinetic_energy = 0.0;
    std::size_t collisions = 0;
};

struct DsmcRunResult {
    std::vector<DsmcStepRecord> records;  // one per step, post-collision
    ParticleSystem system;                // final state
};

DsmcRunResult run_dsmc(const DsmcConfig& cfg);

// Trailing moving average; output[i] covers input[i-window+1 .. i], so the
// result has size input.size() - window + 1.
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

// Largest rebound of the series above its running minimum; 0 for a
// non-increasing series.
double max_rebound(std::span<const double> series);

}  // namespace kinopt
