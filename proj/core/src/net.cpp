#include "kinopt/net.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace kinopt {

ActEval activation_eval(Activation kind, double x) {
    switch (kind) {
        case Activation::Identity:
            return {x, 1.0};
        case Activation::Tanh: {
            const double t = std::tanh(x);
            return {t, 1.0 - t * t};
        }
        case Activation::XTanh: {
            const double t = std::tanh(x);
            return {x * t, t + x * (1.0 - t * t)};
        }
        case Activation::Sigmoid: {
            const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                      : std::exp(x) / (1.0 + std::exp(x));
            return {s, s * (1.0 - s)};
        }
        case Activation::Softplus: {
            // log(1 + e^x), evaluated without overflow on either side
            const double v = x > 0.0 ? x + std::log1p(std::exp(-x))
                                     : std::log1p(std::exp(x));
            const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                      : std::exp(x) / (1.0 + std::exp(x));
            return {v, s};
        }
    }
    throw std::logic_error("activation_eval: unknown kind");
}

const char* activation_name(Activation kind) {
    switch (kind) {
        case Activation::Identity: return "identity";
        case Activation::Tanh: return "tanh";
        case Activation::XTanh: return "xtanh";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Softplus: return "softplus";
    }
    throw std::logic_error("activation_name: unknown kind");
}

Activation activation_from_name(std::string_view name) {
    if (name == "identity") return Activation::Identity;
    if (name == "tanh") return Activation::Tanh;
    if (name == "xtanh") return Activation::XTanh;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "softplus") return Activation::Softplus;
    throw std::invalid_argument("unknown activation: '" + std::string(name) + "'");
}

DenseLayer make_dense_layer(std::size_t in_dim, std::size_t out_dim, Activation act,
                            Rng& rng, double init_stddev) {
    DenseLayer layer;
    layer.weight = gaussian_init(rng, out_dim, in_dim, init_stddev);
    layer.bias.resize(out_dim);
    for (auto& b : layer.bias) b = init_stddev == 0.0 ? 0.0 : init_stddev * rng.normal();
    layer.grad_weight = Matrix(out_dim, in_dim);
    layer.grad_bias.assign(out_dim, 0.0);
    layer.activation = act;
    return layer;
}

void Network::add_layer(DenseLayer layer) {
    if (!layers_.empty() && layers_.back().out_dim() != layer.in_dim()) {
        throw std::invalid_argument("add_layer: layer input dim does not match previous output dim");
    }
    layers_.push_back(std::move(layer));
    forward_done_ = false;
}

Network Network::mlp(const std::vector<std::size_t>& dims, Activation hidden,
                     Rng& rng, double init_stddev) {
    if (dims.size() < 2) throw std::invalid_argument("mlp: need at least input and output dims");
    Network net;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const bool last = l + 2 == dims.size();
        net.add_layer(make_dense_layer(dims[l], dims[l + 1],
                                       last ? Activation::Identity : hidden,
                                       rng, init_stddev));
    }
    return net;
}

std::size_t Network::input_dim() const {
    if (layers_.empty()) throw std::logic_error("input_dim: empty network");
    return layers_.front().in_dim();
}

std::size_t Network::output_dim() const {
    if (layers_.empty()) throw std::logic_error("output_dim: empty network");
    return layers_.back().out_dim();
}

Matrix Network::forward(const Matrix& x) {
    if (layers_.empty()) throw std::logic_error("forward: empty network");
    if (x.cols() != input_dim()) {
        throw std::invalid_argument("forward: input cols do not match first layer in_dim");
    }
    inputs_.assign(layers_.size(), Matrix());
    act_derivs_.assign(layers_.size(), Matrix());
    Matrix cur = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        DenseLayer& layer = layers_[l];
        inputs_[l] = cur;
        Matrix z = matmul(cur, transpose(layer.weight));
        for (std::size_t b = 0; b < z.rows(); ++b) {
            for (std::size_t o = 0; o < z.cols(); ++o) {
                z(b, o) += layer.bias[o];
            }
        }
        Matrix out(z.rows(), z.cols());
        Matrix deriv(z.rows(), z.cols());
        for (std::size_t idx = 0; idx < z.size(); ++idx) {
            const ActEval e = activation_eval(layer.activation, z.data()[idx]);
            out.data()[idx] = e.value;
            deriv.data()[idx] = e.deriv;
        }
        act_derivs_[l] = std::move(deriv);
        cur = std::move(out);
    }
    forward_done_ = true;
    return cur;
}

void Network::backward(const Matrix& loss_grad) {
    if (!forward_done_) {
        throw std::logic_error("backward: no forward pass cached");
    }
    if (loss_grad.rows() != inputs_.front().rows() ||
        loss_grad.cols() != output_dim()) {
        throw std::invalid_argument("backward: loss_grad shape does not match last forward output");
    }
    Matrix delta = loss_grad;
    for (std::size_t li = layers_.size(); li-- > 0;) {
        DenseLayer& layer = layers_[li];
        const Matrix& deriv = act_derivs_[li];
        for (std::size_t idx = 0; idx < delta.size(); ++idx) {
            delta.data()[idx] *= deriv.data()[idx];
        }
        layer.grad_weight = matmul(transpose(delta), inputs_[li]);
        layer.grad_bias.assign(layer.out_dim(), 0.0);
        for (std::size_t b = 0; b < delta.rows(); ++b) {
            for (std::size_t o = 0; o < delta.cols(); ++o) {
                layer.grad_bias[o] += delta(b, o);
            }
        }
        if (li > 0) delta = matmul(delta, layer.weight);
    }
    forward_done_ = false;
}

LossResult mse_loss(const Matrix& pred, const Matrix& target) {
    if (!pred.same_shape(target)) {
        throw std::invalid_argument("mse_loss: shape mismatch");
    }
    const double count = static_cast<double>(pred.size());
    Matrix grad(pred.rows(), pred.cols());
    double loss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double diff = pred.data()[i] - target.data()[i];
        loss += diff * diff;
        grad.data()[i] = 2.0 * diff / count;
    }
    return {loss / count, std::move(grad)};
}

namespace fs = std::filesystem;

void save_checkpoint(const Network& net, const std::string& dir) {
    fs::create_directories(dir);
    std::ofstream manifest(fs::path(dir) / "manifest.txt");
    if (!manifest) throw std::runtime_error("save_checkpoint: cannot write manifest in " + dir);
    manifest << "n_layers = " << net.layers().size() << '\n';
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        const DenseLayer& layer = net.layers()[l];
        manifest << "layer" << l << "_in = " << layer.in_dim() << '\n';
        manifest << "layer" << l << "_out = " << layer.out_dim() << '\n';
        manifest << "layer" << l << "_activation = " << activation_name(layer.activation) << '\n';
        write_csv_file(layer.weight, (fs::path(dir) / ("layer" + std::to_string(l) + "_weight.csv")).string());
        Matrix bias(1, layer.bias.size(), std::vector<double>(layer.bias));
        write_csv_file(bias, (fs::path(dir) / ("layer" + std::to_string(l) + "_bias.csv")).string());
    }
}

Network load_checkpoint(const std::string& dir) {
    std::ifstream manifest(fs::path(dir) / "manifest.txt");
    if (!manifest) throw std::runtime_error("load_checkpoint: cannot read manifest in " + dir);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(manifest, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    const std::size_t n_layers = std::stoull(kv.at("n_layers"));
    Network net;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::string prefix = "layer" + std::to_string(l);
        DenseLayer layer;
        layer.activation = activation_from_name(kv.at(prefix + "_activation"));
        layer.weight = read_csv_file((fs::path(dir) / (prefix + "_weight.csv")).string());
        const Matrix bias = read_csv_file((fs::path(dir) / (prefix + "_bias.csv")).string());
        layer.bias.assign(bias.data(), bias.data() + bias.size());
        const std::size_t in_dim = std::stoull(kv.at(prefix + "_in"));
        const std::size_t out_dim = std::stoull(kv.at(prefix + "_out"));
        if (layer.weight.rows() != out_dim || layer.weight.cols() != in_dim ||
            layer.bias.size() != out_dim) {
            throw std::runtime_error("load_checkpoint: shape mismatch for " + prefix);
        }
        layer.grad_weight = Matrix(out_dim, in_dim);
        layer.grad_bias.assign(out_dim, 0.0);
        net.add_layer(std::move(layer));
    }
    return net;
}

}  // namespace kinopt
