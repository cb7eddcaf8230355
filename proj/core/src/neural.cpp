#include "rmm/neural.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rmm {

namespace {

// tanh through the vectorized exp; absolute error stays near 1e-16.
void fast_tanh(Matrix& z) {
    auto a = z.array();
    const Eigen::ArrayXXd e = (2.0 * a.abs()).exp();
    a = a.sign() * (1.0 - 2.0 / (e + 1.0));
}

void apply_activation(Matrix& z, Activation activation) {
    switch (activation) {
        case Activation::Identity: break;
        case Activation::Tanh: fast_tanh(z); break;
        case Activation::Relu: z = z.cwiseMax(0.0); break;
    }
}

// Derivative expressed through the activation output y.
void multiply_derivative(Matrix& delta, const Matrix& y, Activation activation) {
    switch (activation) {
        case Activation::Identity: break;
        case Activation::Tanh: delta.array() *= 1.0 - y.array().square(); break;
        case Activation::Relu: delta.array() *= (y.array() > 0.0).cast<double>(); break;
    }
}

}  // namespace

std::string_view to_string(Activation activation) noexcept {
    switch (activation) {
        case Activation::Identity: return "identity";
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
    }
    return "unknown";
}

bool MlpGradients::all_finite() const {
    for (const auto& w : weight)
        if (!w.allFinite()) return false;
    for (const auto& b : bias)
        if (!b.allFinite()) return false;
    return true;
}

Mlp::Mlp(std::vector<int> sizes, Activation hidden, Rng& rng, double output_scale)
    : sizes_(std::move(sizes)), hidden_(hidden) {
    if (sizes_.size() < 2) throw std::invalid_argument("network needs at least an input and output size");
    for (int s : sizes_)
        if (s <= 0) throw std::invalid_argument("layer sizes must be positive");
    const std::size_t n_layers = sizes_.size() - 1;
    layers_.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const int in = sizes_[l];
        const int out = sizes_[l + 1];
        const bool last = l + 1 == n_layers;
        double bound = 1.0 / std::sqrt(static_cast<double>(in));
        if (last) bound *= output_scale;
        std::uniform_real_distribution<double> dist(-bound, bound);
        DenseLayer& layer = layers_[l];
        layer.weight.resize(out, in);
        layer.bias.resize(out);
        for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
            for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) layer.weight(i, j) = dist(rng);
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = dist(rng);
        layer.activation = last ? Activation::Identity : hidden_;
    }
}

Mlp::Mlp(std::vector<int> sizes, Activation hidden, std::span<const double> parameters)
    : sizes_(std::move(sizes)), hidden_(hidden) {
    if (sizes_.size() < 2) throw std::invalid_argument("network needs at least an input and output size");
    for (int s : sizes_)
        if (s <= 0) throw std::invalid_argument("layer sizes must be positive");
    const std::size_t n_layers = sizes_.size() - 1;
    layers_.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        layers_[l].weight = Matrix::Zero(sizes_[l + 1], sizes_[l]);
        layers_[l].bias = Vector::Zero(sizes_[l + 1]);
        layers_[l].activation = l + 1 == n_layers ? Activation::Identity : hidden_;
    }
    set_flat_parameters(parameters);
}

void Mlp::check_input(const Matrix& x) const {
    if (layers_.empty()) throw std::logic_error("network has no layers");
    if (x.rows() != input_dim())
        throw std::invalid_argument("network input has " + std::to_string(x.rows()) + " rows, expected " +
                                    std::to_string(input_dim()));
}

Matrix Mlp::forward(const Matrix& x) {
    check_input(x);
    layer_inputs_.resize(layers_.size());
    layer_outputs_.resize(layers_.size());
    const Matrix* current = &x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const DenseLayer& layer = layers_[l];
        layer_inputs_[l] = *current;
        Matrix& z = layer_outputs_[l];
        z.noalias() = layer.weight * layer_inputs_[l];
        z.colwise() += layer.bias;
        apply_activation(z, layer.activation);
        current = &z;
    }
    cached_ = true;
    return layer_outputs_.back();
}

Matrix Mlp::predict(const Matrix& x) const {
    check_input(x);
    Matrix current = x;
    for (const DenseLayer& layer : layers_) {
        Matrix z = layer.weight * current;
        z.colwise() += layer.bias;
        apply_activation(z, layer.activation);
        current = std::move(z);
    }
    return current;
}

MlpGradients Mlp::backward(const Matrix& upstream, bool parameter_grads) const {
    if (!cached_) throw std::logic_error("backward called without a cached forward pass");
    const Matrix& out = layer_outputs_.back();
    if (upstream.rows() != out.rows() || upstream.cols() != out.cols())
        throw std::invalid_argument("upstream gradient shape does not match the network output");

    MlpGradients grads;
    if (parameter_grads) {
        grads.weight.resize(layers_.size());
        grads.bias.resize(layers_.size());
    }
    Matrix delta = upstream;
    for (std::size_t i = layers_.size(); i-- > 0;) {
        const DenseLayer& layer = layers_[i];
        multiply_derivative(delta, layer_outputs_[i], layer.activation);
        if (parameter_grads) {
            grads.weight[i].noalias() = delta * layer_inputs_[i].transpose();
            grads.bias[i] = delta.rowwise().sum();
        }
        Matrix previous;
        previous.noalias() = layer.weight.transpose() * delta;
        delta = std::move(previous);
    }
    grads.input = std::move(delta);
    return grads;
}

std::size_t Mlp::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
    return n;
}

std::vector<double> Mlp::flat_parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& layer : layers_) {
        flat.insert(flat.end(), layer.weight.data(), layer.weight.data() + layer.weight.size());
        flat.insert(flat.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
    }
    return flat;
}

void Mlp::set_flat_parameters(std::span<const double> parameters) {
    if (parameters.size() != parameter_count())
        throw std::invalid_argument("parameter vector has " + std::to_string(parameters.size()) +
                                    " entries, expected " + std::to_string(parameter_count()));
    std::size_t pos = 0;
    for (auto& layer : layers_) {
        std::copy_n(parameters.begin() + static_cast<std::ptrdiff_t>(pos), layer.weight.size(), layer.weight.data());
        pos += static_cast<std::size_t>(layer.weight.size());
        std::copy_n(parameters.begin() + static_cast<std::ptrdiff_t>(pos), layer.bias.size(), layer.bias.data());
        pos += static_cast<std::size_t>(layer.bias.size());
    }
    cached_ = false;
}

std::vector<double> Mlp::flatten(const MlpGradients& grads) {
    std::vector<double> flat;
    for (std::size_t l = 0; l < grads.weight.size(); ++l) {
        flat.insert(flat.end(), grads.weight[l].data(), grads.weight[l].data() + grads.weight[l].size());
        flat.insert(flat.end(), grads.bias[l].data(), grads.bias[l].data() + grads.bias[l].size());
    }
    return flat;
}

void Mlp::blend_from(const Mlp& source, double tau) {
    if (source.sizes_ != sizes_) throw std::invalid_argument("cannot blend networks of different shapes");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        layers_[l].weight = tau * source.layers_[l].weight + (1.0 - tau) * layers_[l].weight;
        layers_[l].bias = tau * source.layers_[l].bias + (1.0 - tau) * layers_[l].bias;
    }
}

bool Mlp::all_finite() const {
    for (const auto& layer : layers_)
        if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
    return true;
}

AdamState::AdamState(const Mlp& net, AdamConfig config) : config_(config) {
    for (const auto& layer : net.layers()) {
        m_weight_.push_back(Matrix::Zero(layer.weight.rows(), layer.weight.cols()));
        v_weight_.push_back(Matrix::Zero(layer.weight.rows(), layer.weight.cols()));
        m_bias_.push_back(Vector::Zero(layer.bias.size()));
        v_bias_.push_back(Vector::Zero(layer.bias.size()));
    }
}

void adam_step(Mlp& net, const MlpGradients& grads, AdamState& state) {
    auto& layers = net.layers();
    if (grads.weight.size() != layers.size() || grads.bias.size() != layers.size() ||
        state.m_weight_.size() != layers.size())
        throw std::invalid_argument("gradient / optimizer state does not match the network");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (grads.weight[l].rows() != layers[l].weight.rows() || grads.weight[l].cols() != layers[l].weight.cols() ||
            grads.bias[l].size() != layers[l].bias.size())
            throw std::invalid_argument("gradient shape does not match the network");
    }
    if (!grads.all_finite()) throw std::invalid_argument("non-finite gradient passed to the optimizer");

    const AdamConfig& c = state.config_;
    ++state.steps_;
    const double t = static_cast<double>(state.steps_);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);
    const double step_size = c.learning_rate * std::sqrt(correction2) / correction1;
    const double eps_hat = c.epsilon * std::sqrt(correction2);

    auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
        m = c.beta1 * m + (1.0 - c.beta1) * g;
        v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
        param.array() -= step_size * m.array() / (v.array().sqrt() + eps_hat);
    };
    for (std::size_t l = 0; l < layers.size(); ++l) {
        update(layers[l].weight, state.m_weight_[l], state.v_weight_[l], grads.weight[l]);
        update(layers[l].bias, state.m_bias_[l], state.v_bias_[l], grads.bias[l]);
    }
    if (!net.all_finite()) throw std::runtime_error("optimizer step produced a non-finite parameter");
}

double ScalarAdam::step(double value, double grad) {
    if (!std::isfinite(grad)) throw std::invalid_argument("non-finite gradient passed to the optimizer");
    ++steps;
    const double t = static_cast<double>(steps);
    m = config.beta1 * m + (1.0 - config.beta1) * grad;
    v = config.beta2 * v + (1.0 - config.beta2) * grad * grad;
    const double m_hat = m / (1.0 - std::pow(config.beta1, t));
    const double v_hat = v / (1.0 - std::pow(config.beta2, t));
    return value - config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
}

Loss squared_error_loss(Matrix target) {
    Loss loss;
    loss.value = [target](const Matrix& out) {
        return (out - target).squaredNorm() / static_cast<double>(out.cols());
    };
    loss.gradient = [target](const Matrix& out) -> Matrix {
        return 2.0 * (out - target) / static_cast<double>(out.cols());
    };
    return loss;
}

double grad_check(Mlp& net, const Matrix& x, const Loss& loss, double eps) {
    const Matrix out = net.forward(x);
    const MlpGradients analytic = net.backward(loss.gradient(out));
    return grad_check(net, x, loss, eps, analytic);
}

double grad_check(Mlp& net, const Matrix& x, const Loss& loss, double eps, const MlpGradients& analytic) {
    if (!(eps >= 1e-6 && eps <= 1e-3)) throw std::invalid_argument("grad_check eps must lie in [1e-6, 1e-3]");
    const std::vector<double> flat_analytic = Mlp::flatten(analytic);
    std::vector<double> params = net.flat_parameters();
    if (flat_analytic.size() != params.size())
        throw std::invalid_argument("analytic gradient does not match the network");

    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + eps;
        net.set_flat_parameters(params);
        const double up = loss.value(net.predict(x));
        params[i] = saved - eps;
        net.set_flat_parameters(params);
        const double down = loss.value(net.predict(x));
        params[i] = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double err = std::abs(flat_analytic[i] - numeric) / std::max(1.0, std::abs(flat_analytic[i]));
        worst = std::max(worst, err);
    }
    net.set_flat_parameters(params);
    return worst;
}

}  // namespace rmm
