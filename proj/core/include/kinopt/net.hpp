#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kinopt/matrix.hpp"
#include "kinopt/rng.hpp"

namespace kinopt {

enum class Activation { Identity, Tanh, XTanh, Sigmoid, Softplus };

struct ActEval {
    double value;
    double deriv;
};

// Value and exact derivative at x. XTanh(x) = x * tanh(x).
ActEval activation_eval(Activation kind, double x);

const char* activation_name(Activation kind);
Activation activation_from_name(std::string_view name);  // throws on unknown name

struct DenseLayer {
    Matrix weight;                  // out_dim x in_dim; rows are the neurons
    std::vector<double> bias;       // out_dim
    Matrix grad_weight;
    std::vector<double> grad_bias;
    Activation activation = Activation::Identity;

    std::size_t in_dim() const { return weight.cols(); }
    std::size_t out_dim() const { return weight.rows(); }
};

DenseLayer make_dense_layer(std::size_t in_dim, std::size_t out_dim, Activation act,
                            Rng& rng, double init_stddev);

// Fully-connected network evaluated row-wise: x is batch x in_dim, each layer
// computes phi(x W^T + b). forward caches what backward needs; backward fills
// grad_weight/grad_bias with the analytic gradient of the composed function.
class Network {
public:
    void add_layer(DenseLayer layer);

    // dims = {in, hidden..., out}. Hidden layers use `hidden`; the final layer
    // uses Identity. All weights and biases are N(0, stddev^2).
    static Network mlp(const std::vector<std::size_t>& dims, Activation hidden,
                       Rng& rng, double init_stddev);

    Matrix forward(const Matrix& x);
    // loss_grad is dLoss/dOutput for the batch passed to the last forward.
    // Throws std::logic_error when called without a preceding forward.
    void backward(const Matrix& loss_grad);

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::size_t input_dim() const;
    std::size_t output_dim() const;

private:
    std::vector<DenseLayer> layers_;
    std::vector<Matrix> inputs_;      // per layer: the batch it consumed
    std::vector<Matrix> act_derivs_;  // per layer: phi'(z), batch x out_dim
    bool forward_done_ = false;
};

struct LossResult {
    double value;
    Matrix grad;
};

// Mean of squared entry differences over batch x outputs; grad is consistent
// with that normalization (2 (pred - target) / count).
LossResult mse_loss(const Matrix& pred, const Matrix& target);

// Checkpoint: a directory of per-layer weight/bias CSV files plus a flat
// key=value manifest describing dims and activations.
void save_checkpoint(const Network& net, const std::string& dir);
Network load_checkpoint(const std::string& dir);

}  // namespace kinopt
