#include "kinopt/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace kinopt {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t Rng::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::size_t Rng::uniform_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be >= 1");
    auto idx = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return idx < n ? idx : n - 1;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

Rng Rng::substream(std::string_view label) const {
    return Rng(mix64(seed_ ^ (fnv1a(label) * kGolden)));
}

std::vector<double> sample_unit_sphere(Rng& rng, std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("sample_unit_sphere: dim must be >= 1");
    std::vector<double> v(dim);
    double norm_sq = 0.0;
    do {
        norm_sq = 0.0;
        for (auto& x : v) {
            x = rng.normal();
            norm_sq += x * x;
        }
    } while (norm_sq == 0.0);
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& x : v) x *= inv;
    return v;
}

Matrix gaussian_init(Rng& rng, std::size_t rows, std::size_t cols, double stddev) {
    if (stddev < 0.0) throw std::invalid_argument("gaussian_init: stddev must be >= 0");
    Matrix m(rows, cols);
    double* d = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) {
        d[i] = stddev == 0.0 ? 0.0 : stddev * rng.normal();
    }
    return m;
}

}  // namespace kinopt
