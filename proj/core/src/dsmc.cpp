#include "kinopt/dsmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace kinopt {

namespace {
constexpr double kHistVmaxFactor = 5.0;
constexpr double kTauSpeedFactor = 6.0;  // wall-rule velocity bound multiplier
}  // namespace

void DsmcConfig::validate() const {
    if (n_particles == 0) throw std::invalid_argument("n_particles must be >= 1");
    if (!(fn > 0.0)) throw std::invalid_argument("fn must be > 0");
    if (!(diameter > 0.0)) throw std::invalid_argument("diameter must be > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
    for (double b : box) {
        if (!(b > 0.0)) throw std::invalid_argument("box extents must be > 0");
    }
    for (std::size_t c : cells) {
        if (c == 0) throw std::invalid_argument("cells must be >= 1 per axis");
    }
    if (!(mass > 0.0)) throw std::invalid_argument("mass must be > 0");
    if (!(kb_t > 0.0)) throw std::invalid_argument("kb_t must be > 0");
    if (hist_bins < 2) throw std::invalid_argument("hist_bins must be >= 2");
    if (vrmax_init < 0.0) throw std::invalid_argument("vrmax_init must be >= 0");
    // Fast particles must not cross a full box extent per step; the bound
    // speed is kTauSpeedFactor times the thermal speed.
    const double min_extent = std::min({box[0], box[1], box[2]});
    if (tau * kTauSpeedFactor * thermal_speed() > min_extent) {
        throw std::invalid_argument(
            "tau too large: tau * " + std::to_string(kTauSpeedFactor) +
            " * sqrt(3 kb_t / mass) must not exceed the smallest box extent");
    }
}

double DsmcConfig::cell_volume() const {
    return box[0] * box[1] * box[2] / static_cast<double>(cell_count());
}

double DsmcConfig::thermal_speed() const { return std::sqrt(3.0 * kb_t / mass); }

double DsmcConfig::resolved_vrmax() const {
    return vrmax_init > 0.0 ? vrmax_init : 3.0 * std::sqrt(6.0 * kb_t / mass);
}

double DsmcConfig::histogram_vmax() const {
    return kHistVmaxFactor * thermal_speed();
}

ParticleSystem::ParticleSystem(const DsmcConfig& cfg, Rng& rng) : cfg_(cfg) {
    cfg_.validate();
    const std::size_t n = cfg_.n_particles;
    pos_.resize(3 * n);
    vel_.resize(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int a = 0; a < 3; ++a) {
            pos_[3 * i + a] = rng.uniform() * cfg_.box[a];
        }
    }
    if (cfg_.equal_speed_start) {
        const double speed = cfg_.thermal_speed();
        for (std::size_t i = 0; i < n; ++i) {
            const auto dir = sample_unit_sphere(rng, 3);
            for (int a = 0; a < 3; ++a) vel_[3 * i + a] = speed * dir[a];
        }
    } else {
        const double sigma = std::sqrt(cfg_.kb_t / cfg_.mass);
        for (std::size_t i = 0; i < 3 * n; ++i) vel_[i] = sigma * rng.normal();
    }
    vrmax_.assign(cfg_.cell_count(), cfg_.resolved_vrmax());
    rebuild_cells();
}

void ParticleSystem::drift(double tau) {
    for (std::size_t i = 0; i < pos_.size(); ++i) {
        pos_[i] += vel_[i] * tau;
    }
}

void ParticleSystem::reflect_walls() {
    for (std::size_t i = 0; i < cfg_.n_particles; ++i) {
        for (int a = 0; a < 3; ++a) {
            double& x = pos_[3 * i + a];
            const double hi = cfg_.box[a];
            while (x < 0.0 || x > hi) {
                if (x < 0.0) {
                    x = -x;
                } else {
                    x = 2.0 * hi - x;
                }
                vel_[3 * i + a] = -vel_[3 * i + a];
            }
        }
    }
}

void ParticleSystem::rebuild_cells() {
    const std::size_t n = cfg_.n_particles;
    const std::size_t n_cells = cfg_.cell_count();
    std::vector<std::uint32_t> cell_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t idx = 0;
        for (int a = 0; a < 3; ++a) {
            const double frac = pos_[3 * i + a] / cfg_.box[a];
            auto c = static_cast<std::size_t>(frac * static_cast<double>(cfg_.cells[a]));
            if (c >= cfg_.cells[a]) c = cfg_.cells[a] - 1;
            idx = idx * cfg_.cells[a] + c;
        }
        cell_of[i] = static_cast<std::uint32_t>(idx);
    }
    cell_start_.assign(n_cells + 1, 0);
    for (std::size_t i = 0; i < n; ++i) ++cell_start_[cell_of[i] + 1];
    for (std::size_t c = 0; c < n_cells; ++c) cell_start_[c + 1] += cell_start_[c];
    cell_items_.resize(n);
    std::vector<std::uint32_t> cursor(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        cell_items_[cursor[cell_of[i]]++] = static_cast<std::uint32_t>(i);
    }
}

std::size_t ParticleSystem::cell_occupancy(std::size_t cell) const {
    return cell_start_[cell + 1] - cell_start_[cell];
}

CollideStats ParticleSystem::collide(Rng& rng) {
    CollideStats stats;
    const double pi = std::numbers::pi;
    const double vc = cfg_.cell_volume();
    const double pair_factor =
        cfg_.fn * pi * cfg_.diameter * cfg_.diameter * cfg_.tau / (2.0 * vc);
    for (std::size_t cell = 0; cell < cfg_.cell_count(); ++cell) {
        const std::size_t begin = cell_start_[cell];
        const std::size_t count = cell_start_[cell + 1] - begin;
        if (count < 2) continue;
        const double vrmax_used = vrmax_[cell];
        const double m_cand = static_cast<double>(count) *
                              static_cast<double>(count - 1) * pair_factor * vrmax_used;
        stats.expected_candidates += m_cand;
        auto n_cand = static_cast<std::size_t>(m_cand);
        if (rng.uniform() < m_cand - static_cast<double>(n_cand)) ++n_cand;

        double vrmax_seen = vrmax_used;
        for (std::size_t c = 0; c < n_cand; ++c) {
            const std::size_t ia = rng.uniform_index(count);
            std::size_t ib = rng.uniform_index(count - 1);
            if (ib >= ia) ++ib;
            const std::size_t pi_idx = cell_items_[begin + ia];
            const std::size_t pj_idx = cell_items_[begin + ib];
            double* vi = &vel_[3 * pi_idx];
            double* vj = &vel_[3 * pj_idx];
            const double rx = vi[0] - vj[0];
            const double ry = vi[1] - vj[1];
            const double rz = vi[2] - vj[2];
            const double vr = std::sqrt(rx * rx + ry * ry + rz * rz);
            vrmax_seen = std::max(vrmax_seen, vr);
            ++stats.candidates;
            if (vr / vrmax_used <= rng.uniform()) continue;

            // Isotropic hard-sphere scattering in the center-of-mass frame.
            const double phi = 2.0 * pi * rng.uniform();
            const double cos_theta = 2.0 * rng.uniform() - 1.0;
            const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
            const double sx = vr * sin_theta * std::cos(phi);
            const double sy = vr * sin_theta * std::sin(phi);
            const double sz = vr * cos_theta;
            const double cmx = 0.5 * (vi[0] + vj[0]);
            const double cmy = 0.5 * (vi[1] + vj[1]);
            const double cmz = 0.5 * (vi[2] + vj[2]);
            vi[0] = cmx + 0.5 * sx;
            vi[1] = cmy + 0.5 * sy;
            vi[2] = cmz + 0.5 * sz;
            vj[0] = cmx - 0.5 * sx;
            vj[1] = cmy - 0.5 * sy;
            vj[2] = cmz - 0.5 * sz;
            ++stats.accepted;
        }
        vrmax_[cell] = vrmax_seen;
    }
    return stats;
}

double ParticleSystem::total_kinetic_energy() const {
    double sum = 0.0;
    for (double v : vel_) sum += v * v;
    return 0.5 * cfg_.mass * sum;
}

std::array<double, 3> ParticleSystem::total_momentum() const {
    std::array<double, 3> p = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < cfg_.n_particles; ++i) {
        for (int a = 0; a < 3; ++a) p[a] += cfg_.mass * vel_[3 * i + a];
    }
    return p;
}

std::vector<double> ParticleSystem::speeds() const {
    std::vector<double> out(cfg_.n_particles);
    for (std::size_t i = 0; i < cfg_.n_particles; ++i) {
        const double x = vel_[3 * i], y = vel_[3 * i + 1], z = vel_[3 * i + 2];
        out[i] = std::sqrt(x * x + y * y + z * z);
    }
    return out;
}

Matrix ParticleSystem::velocities_matrix() const {
    return Matrix(cfg_.n_particles, 3, vel_);
}

VelocityHistogram speed_histogram(std::span<const double> speeds, double hi,
                                  std::size_t bins) {
    if (bins < 1 || !(hi > 0.0)) {
        throw std::invalid_argument("speed_histogram: need hi > 0 and bins >= 1");
    }
    if (speeds.empty()) throw std::invalid_argument("speed_histogram: no samples");
    VelocityHistogram hist;
    hist.edges.resize(bins + 1);
    const double width = hi / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b) {
        hist.edges[b] = width * static_cast<double>(b);
    }
    std::vector<double> counts(bins, 0.0);
    for (double s : speeds) {
        auto b = static_cast<std::size_t>(s / width);
        if (b >= bins) b = bins - 1;
        counts[b] += 1.0;
    }
    hist.density.resize(bins);
    const double norm = 1.0 / (static_cast<double>(speeds.size()) * width);
    for (std::size_t b = 0; b < bins; ++b) hist.density[b] = counts[b] * norm;
    return hist;
}

double h_function(const VelocityHistogram& hist) {
    if (hist.edges.size() != hist.density.size() + 1) {
        throw std::invalid_argument("h_function: edges/density size mismatch");
    }
    double total = 0.0;
    for (std::size_t b = 0; b < hist.density.size(); ++b) {
        total += hist.density[b] * (hist.edges[b + 1] - hist.edges[b]);
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("h_function: histogram is not normalized");
    }
    double h = 0.0;
    for (std::size_t b = 0; b < hist.density.size(); ++b) {
        const double f = hist.density[b];
        if (f > 0.0) h += f * std::log(f) * (hist.edges[b + 1] - hist.edges[b]);
    }
    return h;
}

double maxwell_speed_cdf(double speed, double a2) {
    if (!(a2 > 0.0)) throw std::invalid_argument("maxwell_speed_cdf: a2 must be > 0");
    if (speed <= 0.0) return 0.0;
    const double a = std::sqrt(a2);
    const double x = speed / (std::numbers::sqrt2 * a);
    return std::erf(x) - std::sqrt(2.0 / std::numbers::pi) * (speed / a) *
                             std::exp(-0.5 * speed * speed / a2);
}

double mb_distance(std::span<const double> speeds, double mass) {
    if (speeds.size() < 1000) {
        throw std::invalid_argument("mb_distance: need at least 1000 particles");
    }
    if (!(mass > 0.0)) throw std::invalid_argument("mb_distance: mass must be > 0");
    double mean_sq = 0.0;
    for (double s : speeds) mean_sq += s * s;
    mean_sq /= static_cast<double>(speeds.size());
    const double a2 = mean_sq / 3.0;  // k_B T / m from mean kinetic energy
    if (!(a2 > 0.0)) throw std::invalid_argument("mb_distance: zero kinetic energy");

    std::vector<double> sorted(speeds.begin(), speeds.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = maxwell_speed_cdf(sorted[i], a2);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double mb_distance(const ParticleSystem& sys) {
    const auto s = sys.speeds();
    return mb_distance(s, sys.config().mass);
}

DsmcRunResult run_dsmc(const DsmcConfig& cfg) {
    cfg.validate();
    Rng master(cfg.seed);
    Rng init_rng = master.substream("dsmc-init");
    Rng coll_rng = master.substream("dsmc-collide");
    DsmcRunResult result{{}, ParticleSystem(cfg, init_rng)};
    ParticleSystem& sys = result.system;
    result.records.reserve(cfg.n_steps);
    const double hist_vmax = cfg.histogram_vmax();
    for (std::size_t step = 1; step <= cfg.n_steps; ++step) {
        sys.drift(cfg.tau);
        sys.reflect_walls();
        sys.rebuild_cells();
        const CollideStats stats = sys.collide(coll_rng);
        DsmcStepRecord rec;
        rec.step = step;
        rec.time = cfg.tau * static_cast<double>(step);
        const auto spd = sys.speeds();
        rec.h = h_function(speed_histogram(spd, hist_vmax, cfg.hist_bins));
        rec.mb = spd.size() >= 1000 ? mb_distance(spd, cfg.mass)
                                    : std::numeric_limits<double>::quiet_NaN();
        rec.kinetic_energy = sys.total_kinetic_energy();
        rec.collisions = stats.accepted;
        result.records.push_back(rec);
    }
    return result;
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
    if (window == 0) throw std::invalid_argument("moving_average: window must be >= 1");
    if (series.size() < window) return {};
    std::vector<double> out;
    out.reserve(series.size() - window + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        sum += series[i];
        if (i + 1 >= window) {
            out.push_back(sum / static_cast<double>(window));
            sum -= series[i + 1 - window];
        }
    }
    return out;
}

double max_rebound(std::span<const double> series) {
    double running_min = std::numeric_limits<double>::infinity();
    double rebound = 0.0;
    for (double v : series) {
        running_min = std::min(running_min, v);
        rebound = std::max(rebound, v - running_min);
    }
    return rebound;
}

}  // namespace kinopt
