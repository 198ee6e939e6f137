#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "kinopt/matrix.hpp"
#include "kinopt/rng.hpp"

namespace kinopt {

enum class CollisionMode { Hard, Soft };

struct KineticConfig {
    CollisionMode mode = CollisionMode::Soft;
    double coll_coef = 0.1;   // in [0, 1]
    // Soft variant: zero the coefficient matrix diagonal so the transform is
    // purely pairwise (no uniform self-damping of each gradient row).
    bool soft_zero_diagonal = false;
    // Hard variant: allow at most one collision per neuron per step. Pairs
    // are processed in descending acceptance score; later pairs touching an
    // already-collided neuron are skipped. Restores exact global momentum
    // and energy conservation of the transformed gradients.
    bool hard_max_one_collision_per_neuron = false;
    std::string rng_stream_label = "kinetic";

    void validate() const;  // throws std::invalid_argument
    bool operator==(const KineticConfig&) const = default;
};

// Relative geometry of the neuron rows: w_dist[i][j] = |w_i - w_j|,
// g_dist[i][j] = |g_i - g_j| (Euclidean), both symmetric with zero diagonal.
// The pair midpoint gradient (g_i + g_j)/2 is cheap and computed where used.
struct PairwiseRelatives {
    Matrix w_dist;
    Matrix g_dist;
    double g_dist_max = 0.0;  // max off-diagonal entry of g_dist; 0 when n < 2
};

PairwiseRelatives pairwise_relatives(const Matrix& w, const Matrix& g);

class CollisionMask {
public:
    explicit CollisionMask(std::size_t n) : n_(n), m_(n * n, 0) {}

    std::size_t size() const { return n_; }
    bool operator()(std::size_t i, std::size_t j) const { return m_[i * n_ + j] != 0; }
    // Sets both (i,j) and (j,i); the diagonal is never set.
    void set_pair(std::size_t i, std::size_t j);
    std::size_t count_pairs() const;

private:
    std::size_t n_;
    std::vector<std::uint8_t> m_;
};

// Acceptance test per unordered pair: g_dist * exp(-w_dist) / g_dist_max
// strictly greater than 1 - coll_coef. With coll_coef = 0 the mask is empty
// (the left side never exceeds 1). When all gradient rows coincide
// (g_dist_max = 0) the mask is empty: equal velocities cannot exchange
// momentum.
CollisionMask collision_mask(const PairwiseRelatives& rel, double coll_coef);

// Direction source for a pair (i, j): a unit vector of the given dimension.
// The reverse direction for (j, i) is the negation and is handled internally.
using PairDirectionFn =
    std::function<std::vector<double>(std::size_t i, std::size_t j, std::size_t dim)>;

// Hard collision: for each accepted pair, the two gradient rows exchange
// "momentum" like hard spheres: the pair's mean gradient is kept and the
// relative gradient is re-emitted along a random unit direction. All deltas
// are computed from the pre-collision gradients, then summed per row.
// Weights are inputs only; they are never modified.
Matrix hard_collision(const Matrix& w, const Matrix& g, const KineticConfig& cfg, Rng& rng);
Matrix hard_collision(const Matrix& w, const Matrix& g, const KineticConfig& cfg,
                      const PairDirectionFn& direction);

// Soft collision: repulsion term K = -(cos(w,w) .* cos(g,g)), optionally with
// zeroed diagonal; result is g + coll_coef * (K x g). Rows of zero norm get
// zero cosine entries (no force from or onto dead neurons).
Matrix soft_collision(const Matrix& w, const Matrix& g, const KineticConfig& cfg);

// Dispatch on cfg.mode. coll_coef = 0 short-circuits to an exact copy of g
// without consuming any random draws.
Matrix apply_collision(const Matrix& w, const Matrix& g, const KineticConfig& cfg, Rng& rng);

// Single-pair probe for the stable-phase similarity property: compares the
// absolute row cosine after one plain descent step w - eta*g against the step
// with the collision term applied. Requires a 2-row system in the stable
// phase: w_i.g_i < 0 for both rows and cos(w_0, w_1) > 0; hard mode
// additionally requires (w_1 - w_0).(g_1 - g_0) > 0 and averages the result
// over hard_draws random directions. Throws std::invalid_argument naming the
// first violated condition.
struct SimilarityProbe {
    double abs_cos_initial = 0.0;
    double abs_cos_plain = 0.0;
    double abs_cos_collided = 0.0;  // hard mode: Monte-Carlo mean
    double delta() const { return abs_cos_collided - abs_cos_plain; }
};

SimilarityProbe similarity_probe(const Matrix& w, const Matrix& g, double eta,
                                 const KineticConfig& cfg, Rng& rng,
                                 std::size_t hard_draws = 10000);

}  // namespace kinopt
