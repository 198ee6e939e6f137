#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "kinopt/matrix.hpp"

namespace kinopt {

// Deterministic counter-style generator (splitmix64 core). The 64-bit stream
// is a pure function of the seed, identical across platforms. Floating-point
// uniforms are derived by exact arithmetic from that stream; normal deviates
// additionally go through libm log/sqrt.
//
// Substreams are derived from the construction seed and a label, so a
// component's stream never depends on the draw order of other components.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53 random bits.
    double uniform();
    double uniform(double lo, double hi);

    // Uniform index in [0, n). n must be >= 1.
    std::size_t uniform_index(std::size_t n);

    // Standard normal via the Marsaglia polar method (second deviate cached).
    double normal();

    // Independent generator for (seed, label). Unaffected by draws made on
    // this generator.
    Rng substream(std::string_view label) const;

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Uniform direction on the (dim-1)-sphere: normalized isotropic Gaussian.
// Throws std::invalid_argument for dim == 0. Norm is 1 within 1e-12.
std::vector<double> sample_unit_sphere(Rng& rng, std::size_t dim);

// I.i.d. N(0, stddev^2) entries. stddev must be >= 0.
Matrix gaussian_init(Rng& rng, std::size_t rows, std::size_t cols, double stddev);

}  // namespace kinopt
