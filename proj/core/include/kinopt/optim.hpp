#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "kinopt/kinetic.hpp"
#include "kinopt/net.hpp"
#include "kinopt/rng.hpp"

namespace kinopt {

enum class OptimizerKind { Sgd, Adam, AdamW };

const char* optimizer_name(OptimizerKind kind);
OptimizerKind optimizer_from_name(std::string_view name);

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::Adam;
    double learning_rate = 1e-3;
    double momentum = 0.0;      // SGD only, in [0, 1)
    double weight_decay = 0.0;  // SGD/Adam: coupled (added to gradient); AdamW: decoupled
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;  // throws std::invalid_argument
    bool operator==(const OptimizerConfig&) const = default;
};

// One SGD step on a flat parameter block: buf <- momentum*buf + (g + wd*w),
// w <- w - lr*buf. Classical coupled weight decay.
void sgd_step(std::span<double> w, std::span<const double> g,
              std::span<double> momentum_buf, const OptimizerConfig& cfg);

// One bias-corrected Adam step (step number t >= 1). With kind == AdamW the
// decay is decoupled and applied as w <- w - lr*wd*w before the adaptive
// update; with kind == Adam a nonzero decay is coupled into the gradient.
void adam_step(std::span<double> w, std::span<const double> g,
               std::span<double> m, std::span<double> v, long t,
               const OptimizerConfig& cfg);

// Base first-order optimizer over all layers of a network (weights and
// biases). State buffers are allocated lazily to match parameter shapes.
class Optimizer {
public:
    explicit Optimizer(OptimizerConfig cfg);

    // Applies one step using the gradients currently stored in the network.
    void step(Network& net);

    const OptimizerConfig& config() const { return cfg_; }
    long step_count() const { return step_count_; }

private:
    struct Slot {
        std::vector<double> a;  // SGD momentum buffer or Adam m
        std::vector<double> b;  // Adam v
    };
    void ensure_slots(const Network& net);
    void step_block(std::span<double> w, std::span<const double> g, Slot& slot);

    OptimizerConfig cfg_;
    std::vector<Slot> slots_;  // 2 per layer: weight block, bias block
    long step_count_ = 0;
};

// Kinetic wrapper: transforms the raw backprop gradients of the target layers
// (weights only, never biases) and then delegates to the base optimizer.
// With coll_coef = 0 or an empty target set the trajectory is bit-identical
// to the base optimizer and no random draws are consumed.
class KineticOptimizer {
public:
    KineticOptimizer(OptimizerConfig base, KineticConfig kinetic,
                     std::vector<std::size_t> target_layers, Rng rng);

    void step(Network& net);

    Optimizer& base() { return base_; }
    const KineticConfig& kinetic_config() const { return kinetic_; }
    const std::vector<std::size_t>& target_layers() const { return target_layers_; }

private:
    Optimizer base_;
    KineticConfig kinetic_;
    std::vector<std::size_t> target_layers_;
    Rng rng_;
};

}  // namespace kinopt
