#include "kinopt/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kinopt/metrics.hpp"

namespace kinopt {

void KineticConfig::validate() const {
    if (!(coll_coef >= 0.0 && coll_coef <= 1.0)) {
        throw std::invalid_argument("coll_coef must be in [0, 1]");
    }
}

namespace {

double row_distance(const Matrix& a, std::size_t i, std::size_t j) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) {
        const double d = a(i, k) - a(j, k);
        sum += d * d;
    }
    return std::sqrt(sum);
}

void check_same_shape(const Matrix& w, const Matrix& g, const char* op) {
    if (!w.same_shape(g)) {
        throw std::invalid_argument(std::string(op) + ": w and g shapes differ");
    }
    if (w.rows() == 0) {
        throw std::invalid_argument(std::string(op) + ": need at least one row");
    }
}

}  // namespace

PairwiseRelatives pairwise_relatives(const Matrix& w, const Matrix& g) {
    check_same_shape(w, g, "pairwise_relatives");
    const std::size_t n = w.rows();
    PairwiseRelatives rel{Matrix(n, n), Matrix(n, n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double wd = row_distance(w, i, j);
            const double gd = row_distance(g, i, j);
            rel.w_dist(i, j) = rel.w_dist(j, i) = wd;
            rel.g_dist(i, j) = rel.g_dist(j, i) = gd;
            rel.g_dist_max = std::max(rel.g_dist_max, gd);
        }
    }
    return rel;
}

void CollisionMask::set_pair(std::size_t i, std::size_t j) {
    if (i == j) return;
    m_[i * n_ + j] = 1;
    m_[j * n_ + i] = 1;
}

std::size_t CollisionMask::count_pairs() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            if ((*this)(i, j)) ++c;
        }
    }
    return c;
}

CollisionMask collision_mask(const PairwiseRelatives& rel, double coll_coef) {
    if (!(coll_coef >= 0.0 && coll_coef <= 1.0)) {
        throw std::invalid_argument("collision_mask: coll_coef must be in [0, 1]");
    }
    const std::size_t n = rel.w_dist.rows();
    CollisionMask mask(n);
    if (rel.g_dist_max == 0.0) return mask;
    const double threshold = 1.0 - coll_coef;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double lhs =
                rel.g_dist(i, j) * std::exp(-rel.w_dist(i, j)) / rel.g_dist_max;
            if (lhs > threshold) mask.set_pair(i, j);
        }
    }
    return mask;
}

namespace {

struct AcceptedPair {
    std::size_t i, j;
    double score;  // the acceptance-test left-hand side
};

Matrix hard_collision_impl(const Matrix& w, const Matrix& g, const KineticConfig& cfg,
                           const PairDirectionFn& direction) {
    check_same_shape(w, g, "hard_collision");
    cfg.validate();
    if (cfg.mode != CollisionMode::Hard) {
        throw std::invalid_argument("hard_collision: config mode is not Hard");
    }
    Matrix result = g;
    if (cfg.coll_coef == 0.0) return result;

    const PairwiseRelatives rel = pairwise_relatives(w, g);
    const CollisionMask mask = collision_mask(rel, cfg.coll_coef);
    const std::size_t n = g.rows(), d = g.cols();

    std::vector<AcceptedPair> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!mask(i, j)) continue;
            const double score =
                rel.g_dist(i, j) * std::exp(-rel.w_dist(i, j)) / rel.g_dist_max;
            pairs.push_back({i, j, score});
        }
    }
    if (cfg.hard_max_one_collision_per_neuron) {
        std::stable_sort(pairs.begin(), pairs.end(),
                         [](const AcceptedPair& a, const AcceptedPair& b) {
                             return a.score > b.score;
                         });
        std::vector<std::uint8_t> used(n, 0);
        std::vector<AcceptedPair> kept;
        for (const auto& p : pairs) {
            if (used[p.i] || used[p.j]) continue;
            used[p.i] = used[p.j] = 1;
            kept.push_back(p);
        }
        pairs = std::move(kept);
    }

    // Every delta is evaluated from the pre-collision gradients, then the
    // per-row deltas are summed.
    for (const auto& p : pairs) {
        const std::vector<double> dir = direction(p.i, p.j, d);
        const double half_gr = 0.5 * rel.g_dist(p.i, p.j);
        auto gi = g.row(p.i);
        auto gj = g.row(p.j);
        auto ri = result.row(p.i);
        auto rj = result.row(p.j);
        for (std::size_t k = 0; k < d; ++k) {
            const double g_cm = 0.5 * (gi[k] + gj[k]);
            ri[k] += g_cm + half_gr * dir[k] - gi[k];
            rj[k] += g_cm - half_gr * dir[k] - gj[k];
        }
    }
    return result;
}

}  // namespace

Matrix hard_collision(const Matrix& w, const Matrix& g, const KineticConfig& cfg,
                      const PairDirectionFn& direction) {
    return hard_collision_impl(w, g, cfg, direction);
}

Matrix hard_collision(const Matrix& w, const Matrix& g, const KineticConfig& cfg, Rng& rng) {
    return hard_collision_impl(
        w, g, cfg,
        [&rng](std::size_t, std::size_t, std::size_t dim) {
            return sample_unit_sphere(rng, dim);
        });
}

Matrix soft_collision(const Matrix& w, const Matrix& g, const KineticConfig& cfg) {
    check_same_shape(w, g, "soft_collision");
    cfg.validate();
    if (cfg.mode != CollisionMode::Soft) {
        throw std::invalid_argument("soft_collision: config mode is not Soft");
    }
    if (cfg.coll_coef == 0.0) return g;

    const Matrix cos_w = cosine_matrix(w);
    const Matrix cos_g = cosine_matrix(g);
    const std::size_t n = g.rows();
    Matrix coeff(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (cfg.soft_zero_diagonal && i == j) continue;
            coeff(i, j) = -cos_w(i, j) * cos_g(i, j);
        }
    }
    const Matrix repulsion = matmul(coeff, g);
    Matrix result = g;
    for (std::size_t i = 0; i < result.size(); ++i) {
        result.data()[i] += cfg.coll_coef * repulsion.data()[i];
    }
    return result;
}

Matrix apply_collision(const Matrix& w, const Matrix& g, const KineticConfig& cfg, Rng& rng) {
    if (cfg.coll_coef == 0.0) return g;
    return cfg.mode == CollisionMode::Hard ? hard_collision(w, g, cfg, rng)
                                           : soft_collision(w, g, cfg);
}

namespace {

double row_dot(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) sum += a(i, k) * b(j, k);
    return sum;
}

double abs_row_cosine(const Matrix& w) {
    const double n0 = std::sqrt(row_dot(w, 0, w, 0));
    const double n1 = std::sqrt(row_dot(w, 1, w, 1));
    if (n0 == 0.0 || n1 == 0.0) return 0.0;
    return std::abs(row_dot(w, 0, w, 1) / (n0 * n1));
}

Matrix descent_step(const Matrix& w, const Matrix& g, double eta) {
    Matrix out = w;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] -= eta * g.data()[i];
    }
    return out;
}

}  // namespace

SimilarityProbe similarity_probe(const Matrix& w, const Matrix& g, double eta,
                                 const KineticConfig& cfg, Rng& rng,
                                 std::size_t hard_draws) {
    check_same_shape(w, g, "similarity_probe");
    if (w.rows() != 2) {
        throw std::invalid_argument("similarity_probe: requires exactly 2 rows");
    }
    cfg.validate();
    if (row_dot(w, 0, g, 0) >= 0.0) {
        throw std::invalid_argument("similarity_probe: violated precondition w_0.g_0 < 0");
    }
    if (row_dot(w, 1, g, 1) >= 0.0) {
        throw std::invalid_argument("similarity_probe: violated precondition w_1.g_1 < 0");
    }
    const double n0 = std::sqrt(row_dot(w, 0, w, 0));
    const double n1 = std::sqrt(row_dot(w, 1, w, 1));
    if (n0 == 0.0 || n1 == 0.0 || row_dot(w, 0, w, 1) / (n0 * n1) <= 0.0) {
        throw std::invalid_argument("similarity_probe: violated precondition cos(w_0, w_1) > 0");
    }
    if (cfg.mode == CollisionMode::Hard) {
        double closing = 0.0;
        for (std::size_t k = 0; k < w.cols(); ++k) {
            closing += (w(1, k) - w(0, k)) * (g(1, k) - g(0, k));
        }
        if (closing <= 0.0) {
            throw std::invalid_argument(
                "similarity_probe: violated precondition (w_1 - w_0).(g_1 - g_0) > 0");
        }
    }

    SimilarityProbe probe;
    probe.abs_cos_initial = abs_row_cosine(w);
    probe.abs_cos_plain = abs_row_cosine(descent_step(w, g, eta));

    if (cfg.coll_coef == 0.0) {
        probe.abs_cos_collided = probe.abs_cos_plain;
        return probe;
    }
    if (cfg.mode == CollisionMode::Soft) {
        const Matrix g_star = soft_collision(w, g, cfg);
        probe.abs_cos_collided = abs_row_cosine(descent_step(w, g_star, eta));
        return probe;
    }
    if (hard_draws == 0) {
        throw std::invalid_argument("similarity_probe: hard_draws must be >= 1");
    }
    {
        const PairwiseRelatives rel = pairwise_relatives(w, g);
        if (collision_mask(rel, cfg.coll_coef).count_pairs() == 0) {
            throw std::invalid_argument(
                "similarity_probe: pair not accepted by the collision test");
        }
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < hard_draws; ++t) {
        const Matrix g_star = hard_collision(w, g, cfg, rng);
        sum += abs_row_cosine(descent_step(w, g_star, eta));
    }
    probe.abs_cos_collided = sum / static_cast<double>(hard_draws);
    return probe;
}

}  // namespace kinopt
