#include "kinopt/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace kinopt {

const char* optimizer_name(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::Sgd: return "sgd";
        case OptimizerKind::Adam: return "adam";
        case OptimizerKind::AdamW: return "adamw";
    }
    throw std::logic_error("optimizer_name: unknown kind");
}

OptimizerKind optimizer_from_name(std::string_view name) {
    if (name == "sgd") return OptimizerKind::Sgd;
    if (name == "adam") return OptimizerKind::Adam;
    if (name == "adamw") return OptimizerKind::AdamW;
    throw std::invalid_argument("unknown optimizer: '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must be in [0, 1)");
    if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight_decay must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("beta1 must be in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("beta2 must be in [0, 1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
}

void sgd_step(std::span<double> w, std::span<const double> g,
              std::span<double> momentum_buf, const OptimizerConfig& cfg) {
    if (w.size() != g.size() || w.size() != momentum_buf.size()) {
        throw std::invalid_argument("sgd_step: buffer sizes differ");
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double grad = g[i] + cfg.weight_decay * w[i];
        momentum_buf[i] = cfg.momentum * momentum_buf[i] + grad;
        w[i] -= cfg.learning_rate * momentum_buf[i];
    }
}

void adam_step(std::span<double> w, std::span<const double> g,
               std::span<double> m, std::span<double> v, long t,
               const OptimizerConfig& cfg) {
    if (w.size() != g.size() || w.size() != m.size() || w.size() != v.size()) {
        throw std::invalid_argument("adam_step: buffer sizes differ");
    }
    if (t < 1) throw std::invalid_argument("adam_step: step number must be >= 1");
    const bool decoupled = cfg.kind == OptimizerKind::AdamW;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (decoupled) w[i] -= cfg.learning_rate * cfg.weight_decay * w[i];
        const double grad = decoupled ? g[i] : g[i] + cfg.weight_decay * w[i];
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad * grad;
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        w[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

Optimizer::Optimizer(OptimizerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void Optimizer::ensure_slots(const Network& net) {
    if (!slots_.empty()) {
        if (slots_.size() != 2 * net.layers().size()) {
            throw std::invalid_argument("Optimizer: network layer count changed mid-run");
        }
        return;
    }
    slots_.resize(2 * net.layers().size());
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        const DenseLayer& layer = net.layers()[l];
        slots_[2 * l].a.assign(layer.weight.size(), 0.0);
        slots_[2 * l + 1].a.assign(layer.bias.size(), 0.0);
        if (cfg_.kind != OptimizerKind::Sgd) {
            slots_[2 * l].b.assign(layer.weight.size(), 0.0);
            slots_[2 * l + 1].b.assign(layer.bias.size(), 0.0);
        }
    }
}

void Optimizer::step_block(std::span<double> w, std::span<const double> g, Slot& slot) {
    if (cfg_.kind == OptimizerKind::Sgd) {
        sgd_step(w, g, slot.a, cfg_);
    } else {
        adam_step(w, g, slot.a, slot.b, step_count_, cfg_);
    }
}

void Optimizer::step(Network& net) {
    ensure_slots(net);
    ++step_count_;
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        DenseLayer& layer = net.layers()[l];
        if (layer.grad_weight.size() != layer.weight.size()) {
            throw std::invalid_argument("Optimizer::step: gradient shape mismatch");
        }
        step_block({layer.weight.data(), layer.weight.size()},
                   {layer.grad_weight.data(), layer.grad_weight.size()},
                   slots_[2 * l]);
        step_block({layer.bias.data(), layer.bias.size()},
                   {layer.grad_bias.data(), layer.grad_bias.size()},
                   slots_[2 * l + 1]);
    }
}

KineticOptimizer::KineticOptimizer(OptimizerConfig base, KineticConfig kinetic,
                                   std::vector<std::size_t> target_layers, Rng rng)
    : base_(base), kinetic_(kinetic), target_layers_(std::move(target_layers)),
      rng_(rng.substream(kinetic.rng_stream_label)) {
    kinetic_.validate();
}

void KineticOptimizer::step(Network& net) {
    if (kinetic_.coll_coef != 0.0) {
        for (std::size_t l : target_layers_) {
            if (l >= net.layers().size()) {
                throw std::invalid_argument("KineticOptimizer: target layer index out of range");
            }
            DenseLayer& layer = net.layers()[l];
            layer.grad_weight =
                apply_collision(layer.weight, layer.grad_weight, kinetic_, rng_);
        }
    }
    base_.step(net);
}

}  // namespace kinopt
