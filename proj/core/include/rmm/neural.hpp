#pragma once

// Dense feed-forward networks with hand-written reverse mode, Adam, and a
// central-difference gradient checker. Batches are column-major: one sample
// per column, one feature per row.

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rmm/rng.hpp"

namespace rmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation : int { Identity = 0, Tanh = 1, Relu = 2 };
std::string_view to_string(Activation activation) noexcept;

struct DenseLayer {
    Matrix weight;  // out x in
    Vector bias;    // out
    Activation activation = Activation::Identity;
};

struct MlpGradients {
    std::vector<Matrix> weight;
    std::vector<Vector> bias;
    Matrix input;  // dL/dx, same shape as the forward input

    bool all_finite() const;
};

class Mlp {
public:
    Mlp() = default;
    /// sizes = {in, hidden..., out}. Hidden layers use `hidden`, the output is
    /// linear. Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)); the
    /// output layer is further multiplied by output_scale.
    Mlp(std::vector<int> sizes, Activation hidden, Rng& rng, double output_scale = 1.0);
    /// Builds a network from a flat parameter vector (layer by layer: weights
    /// column-major, then biases).
    Mlp(std::vector<int> sizes, Activation hidden, std::span<const double> parameters);

    int input_dim() const noexcept { return sizes_.empty() ? 0 : sizes_.front(); }
    int output_dim() const noexcept { return sizes_.empty() ? 0 : sizes_.back(); }
    const std::vector<int>& sizes() const noexcept { return sizes_; }
    Activation hidden_activation() const noexcept { return hidden_; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

    /// Forward pass that caches activations for backward(). Throws
    /// std::invalid_argument on an input row count mismatch.
    Matrix forward(const Matrix& x);
    /// Forward pass without caching; safe to call concurrently on a shared net.
    Matrix predict(const Matrix& x) const;
    /// Reverse pass from dL/d(output) of the last forward(). Throws
    /// std::logic_error when no forward pass is cached.
    MlpGradients backward(const Matrix& upstream, bool parameter_grads = true) const;

    std::size_t parameter_count() const noexcept;
    std::vector<double> flat_parameters() const;
    void set_flat_parameters(std::span<const double> parameters);
    static std::vector<double> flatten(const MlpGradients& grads);

    /// this <- tau * source + (1 - tau) * this.
    void blend_from(const Mlp& source, double tau);
    bool all_finite() const;

private:
    void check_input(const Matrix& x) const;

    std::vector<int> sizes_;
    Activation hidden_ = Activation::Tanh;
    std::vector<DenseLayer> layers_;
    std::vector<Matrix> layer_inputs_;
    std::vector<Matrix> layer_outputs_;
    bool cached_ = false;
};

struct AdamConfig {
    double learning_rate = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class AdamState {
public:
    AdamState() = default;
    AdamState(const Mlp& net, AdamConfig config);

    const AdamConfig& config() const noexcept { return config_; }
    long steps() const noexcept { return steps_; }

private:
    friend void adam_step(Mlp& net, const MlpGradients& grads, AdamState& state);
    AdamConfig config_;
    long steps_ = 0;
    std::vector<Matrix> m_weight_, v_weight_;
    std::vector<Vector> m_bias_, v_bias_;
};

/// Bias-corrected Adam update. Throws std::invalid_argument on non-finite or
/// mis-shaped gradients and std::runtime_error if the update produced a
/// non-finite parameter.
void adam_step(Mlp& net, const MlpGradients& grads, AdamState& state);

/// Adam on a single scalar (the SAC temperature).
struct ScalarAdam {
    AdamConfig config;
    double m = 0.0;
    double v = 0.0;
    long steps = 0;

    double step(double value, double grad);
};

/// A scalar loss of the network output together with its gradient.
struct Loss {
    std::function<double(const Matrix&)> value;
    std::function<Matrix(const Matrix&)> gradient;
};

/// Mean over samples of the squared error summed over outputs.
Loss squared_error_loss(Matrix target);

/// Max over parameters of |analytic - central difference| / max(1, |analytic|).
/// eps must lie in [1e-6, 1e-3].
double grad_check(Mlp& net, const Matrix& x, const Loss& loss, double eps);
/// Same, against externally supplied analytic gradients.
double grad_check(Mlp& net, const Matrix& x, const Loss& loss, double eps, const MlpGradients& analytic);

}  // namespace rmm
