#include "rmm/dqn.hpp"

#include <algorithm>
#include <stdexcept>

namespace rmm {

void DqnConfig::validate() const {
    if (episodes < 1) throw std::invalid_argument("dqn.episodes must be at least 1");
    if (update_interval < 1) throw std::invalid_argument("dqn.update_interval must be at least 1");
    if (!(lr > 0.0)) throw std::invalid_argument("dqn.lr must be positive");
    if (batch < 1) throw std::invalid_argument("dqn.batch must be at least 1");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("dqn.gamma must lie in [0, 1]");
    if (!(epsilon_end >= 0.0 && epsilon_end <= epsilon_start && epsilon_start <= 1.0))
        throw std::invalid_argument("dqn epsilon schedule must satisfy 0 <= epsilon_end <= epsilon_start <= 1");
    if (!(epsilon_fraction >= 0.0 && epsilon_fraction <= 1.0))
        throw std::invalid_argument("dqn.epsilon_fraction must lie in [0, 1]");
    if (target_sync < 1) throw std::invalid_argument("dqn.target_sync must be at least 1");
    if (hidden.empty()) throw std::invalid_argument("dqn.hidden must list at least one layer");
    for (int h : hidden)
        if (h < 1) throw std::invalid_argument("dqn.hidden sizes must be positive");
    if (warmup_steps < 0) throw std::invalid_argument("dqn.warmup_steps must be non-negative");
    if (buffer_capacity < static_cast<std::size_t>(batch))
        throw std::invalid_argument("dqn.buffer_capacity must be at least the batch size");
}

double epsilon_at(long step, long total_steps, const DqnConfig& config) noexcept {
    const double horizon = config.epsilon_fraction * static_cast<double>(total_steps);
    if (horizon <= 0.0) return config.epsilon_end;
    const double progress = std::clamp(static_cast<double>(step) / horizon, 0.0, 1.0);
    if (progress >= 1.0) return config.epsilon_end;
    return config.epsilon_start + progress * (config.epsilon_end - config.epsilon_start);
}

int greedy_action(std::span<const double> q_values) {
    if (q_values.empty()) throw std::invalid_argument("no action values");
    int best = 0;
    for (std::size_t a = 1; a < q_values.size(); ++a)
        if (q_values[a] > q_values[static_cast<std::size_t>(best)]) best = static_cast<int>(a);
    return best;
}

int greedy_action(const Matrix& q_column) {
    return greedy_action(std::span<const double>(q_column.data(), static_cast<std::size_t>(q_column.rows())));
}

DqnAgent::DqnAgent(int obs_dim, int n_actions, const DqnConfig& config, Rng& rng) : config_(config) {
    config_.validate();
    if (n_actions < 2) throw std::invalid_argument("dqn needs at least two actions");
    std::vector<int> sizes{obs_dim};
    sizes.insert(sizes.end(), config_.hidden.begin(), config_.hidden.end());
    sizes.push_back(n_actions);
    q_ = Mlp(sizes, config_.activation, rng);
    target_ = q_;
    opt_ = AdamState(q_, AdamConfig{config_.lr});
}

DqnAgent::DqnAgent(Mlp q_net, const DqnConfig& config) : config_(config), q_(std::move(q_net)) {
    config_.validate();
    target_ = q_;
    opt_ = AdamState(q_, AdamConfig{config_.lr});
}

std::vector<double> DqnAgent::q_values(std::span<const double> features) const {
    if (static_cast<int>(features.size()) != obs_dim()) throw std::invalid_argument("observation dimension mismatch");
    Matrix x(obs_dim(), 1);
    for (int i = 0; i < obs_dim(); ++i) x(i, 0) = features[static_cast<std::size_t>(i)];
    const Matrix q = q_.predict(x);
    return {q.data(), q.data() + q.size()};
}

int DqnAgent::act(std::span<const double> features, double epsilon, Rng& rng) const {
    // The exploration draw is always consumed so the stream does not depend on epsilon.
    const double u = uniform01(rng);
    const int random_pick = std::uniform_int_distribution<int>(0, n_actions() - 1)(rng);
    if (u < epsilon) return random_pick;
    return greedy_action(q_values(features));
}

Vector DqnAgent::td_targets(const ReplayBatch& batch) const {
    const Matrix next_q = target_.predict(batch.next_obs);
    Vector targets(batch.reward.size());
    for (Eigen::Index j = 0; j < targets.size(); ++j) {
        const double bootstrap = batch.done(j) != 0.0 ? 0.0 : next_q.col(j).maxCoeff();
        targets(j) = batch.reward(j) + config_.gamma * bootstrap;
    }
    return targets;
}

std::optional<double> DqnAgent::update(const ReplayBuffer& buffer, Rng& rng) {
    const auto batch_size = static_cast<std::size_t>(config_.batch);
    if (buffer.size() < batch_size) return std::nullopt;
    const ReplayBatch batch = buffer.sample(batch_size, rng);
    const Vector targets = td_targets(batch);

    const Matrix q = q_.forward(batch.obs);
    Matrix upstream = Matrix::Zero(q.rows(), q.cols());
    const auto n = static_cast<double>(batch_size);
    double loss = 0.0;
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const auto a = static_cast<Eigen::Index>(batch.action(0, j));
        const double err = q(a, j) - targets(j);
        loss += err * err;
        upstream(a, j) = 2.0 * err / n;
    }
    adam_step(q_, q_.backward(upstream), opt_);
    ++updates_;
    if (updates_ % config_.target_sync == 0) sync_target();
    return loss / n;
}

}  // namespace rmm
