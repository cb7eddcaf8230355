#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rmm/neural.hpp"
#include "rmm/replay.hpp"
#include "rmm/rng.hpp"

namespace rmm {

struct DqnConfig {
    int episodes = 30000;
    int update_interval = 1;  // environment steps between gradient steps
    double lr = 1e-4;
    int batch = 64;
    double gamma = 0.99;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_fraction = 0.2;  // share of training steps spent annealing
    int target_sync = 1000;         // gradient steps between hard target copies
    std::vector<int> hidden = {64, 64};
    Activation activation = Activation::Tanh;
    int warmup_steps = 1000;
    std::size_t buffer_capacity = 1'000'000;

    void validate() const;
};

/// Linear anneal from epsilon_start to epsilon_end over the first
/// epsilon_fraction of total_steps, constant afterwards.
double epsilon_at(long step, long total_steps, const DqnConfig& config) noexcept;

/// Index of the largest value; ties go to the lowest index.
int greedy_action(std::span<const double> q_values);
int greedy_action(const Matrix& q_column);

class DqnAgent {
public:
    DqnAgent(int obs_dim, int n_actions, const DqnConfig& config, Rng& rng);
    /// Wraps an existing Q-network (e.g. loaded from a checkpoint).
    DqnAgent(Mlp q_net, const DqnConfig& config);

    int obs_dim() const noexcept { return q_.input_dim(); }
    int n_actions() const noexcept { return q_.output_dim(); }
    const DqnConfig& config() const noexcept { return config_; }

    /// Uniform random action with probability epsilon, otherwise greedy.
    int act(std::span<const double> features, double epsilon, Rng& rng) const;
    std::vector<double> q_values(std::span<const double> features) const;

    /// One squared-error TD step toward r + gamma * max_a' Q_target(s', a')
    /// (no bootstrap on terminal transitions). The target network is copied
    /// every target_sync steps. Returns std::nullopt when the buffer holds
    /// fewer than `batch` transitions.
    std::optional<double> update(const ReplayBuffer& buffer, Rng& rng);
    /// TD targets for a batch under the current target network.
    Vector td_targets(const ReplayBatch& batch) const;
    void sync_target() { target_ = q_; }

    const Mlp& q_net() const noexcept { return q_; }
    const Mlp& target_net() const noexcept { return target_; }
    Mlp& mutable_q_net() noexcept { return q_; }
    long updates() const noexcept { return updates_; }

private:
    DqnConfig config_;
    Mlp q_;
    Mlp target_;
    AdamState opt_;
    long updates_ = 0;
};

}  // namespace rmm
