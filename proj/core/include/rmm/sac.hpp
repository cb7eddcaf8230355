#pragma once

// Soft actor-critic with a tanh-squashed Gaussian actor, twin critics with
// Polyak-averaged targets, and an automatically tuned temperature.
//
// Actions are handled in normalized form y = tanh(u) in (-1, 1)^d; the replay
// buffer and critics see y, the environment sees the affine image of y in the
// action box.

#include <optional>
#include <span>
#include <vector>

#include "rmm/neural.hpp"
#include "rmm/replay.hpp"
#include "rmm/rng.hpp"

namespace rmm {

struct SacConfig {
    int episodes = 30000;
    int update_interval = 1000;  // environment steps between update rounds
    int gradient_steps = 0;      // gradient steps per round; 0 means update_interval
    double lr_actor = 3e-4;
    double lr_critic = 3e-4;
    double lr_alpha = 3e-4;
    int batch = 64;
    double gamma = 0.99;
    double tau = 0.005;
    std::optional<double> fixed_alpha;  // disables temperature tuning
    double initial_alpha = 1.0;
    std::vector<int> hidden = {64, 64};
    Activation activation = Activation::Tanh;
    int warmup_steps = 1000;  // uniform random actions before the first update
    std::size_t buffer_capacity = 1'000'000;

    void validate() const;
    int steps_per_round() const noexcept { return gradient_steps > 0 ? gradient_steps : update_interval; }
};

struct ActionBox {
    std::vector<double> low;
    std::vector<double> high;

    int dim() const noexcept { return static_cast<int>(low.size()); }
    std::vector<double> to_box(std::span<const double> normalized) const;
    static ActionBox symmetric(int dim, double bound);
};

/// Output rows of the actor network: [mean(0..d), log_std(0..d)].
constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;

/// Normalized deterministic action tanh(mean) of an actor for one input.
std::vector<double> deterministic_action(const Mlp& actor, std::span<const double> features);

struct SacSample {
    std::vector<double> normalized;
    std::vector<double> action;  // in the box
};

struct SacLosses {
    double critic = 0.0;
    double actor = 0.0;
    double alpha = 0.0;
    double entropy = 0.0;  // -mean log pi of the actor's batch sample
};

/// Actor loss mean(alpha * log pi(y|s) - min_i Q_i(s, y)) evaluated with fixed
/// reparameterization noise, with its gradient w.r.t. the actor parameters.
struct ActorObjective {
    double loss = 0.0;
    double mean_log_prob = 0.0;
    MlpGradients gradients;
};

class SacAgent {
public:
    SacAgent(int obs_dim, ActionBox box, const SacConfig& config, Rng& rng);

    int obs_dim() const noexcept { return obs_dim_; }
    int action_dim() const noexcept { return box_.dim(); }
    const ActionBox& box() const noexcept { return box_; }
    const SacConfig& config() const noexcept { return config_; }
    double alpha() const noexcept;

    /// Stochastic mode samples a squashed Gaussian; deterministic mode returns
    /// the squashed mean.
    SacSample act(std::span<const double> features, bool deterministic, Rng& rng) const;
    SacSample random_action(Rng& rng) const;

    /// One gradient step on critics, actor and temperature, then a Polyak
    /// target update. Returns std::nullopt (and does nothing) while the buffer
    /// holds fewer than `batch` transitions.
    std::optional<SacLosses> update(const ReplayBuffer& buffer, Rng& rng);

    ActorObjective actor_objective(const Matrix& obs, const Matrix& noise);

    const Mlp& actor() const noexcept { return actor_; }
    const Mlp& critic(int i) const { return i == 0 ? critic1_ : critic2_; }
    const Mlp& target_critic(int i) const { return i == 0 ? target1_ : target2_; }
    Mlp& mutable_actor() noexcept { return actor_; }
    Mlp& mutable_critic(int i) { return i == 0 ? critic1_ : critic2_; }
    long updates() const noexcept { return updates_; }

private:
    struct PolicyDraw {
        Matrix mean, log_std, pre_tanh, action, noise;
        Matrix std;
        Vector log_prob;
        Matrix clamp_mask;
    };
    PolicyDraw draw(const Matrix& actor_out, const Matrix& noise) const;
    Matrix critic_input(const Matrix& obs, const Matrix& action) const;

    int obs_dim_;
    ActionBox box_;
    SacConfig config_;
    Mlp actor_, critic1_, critic2_, target1_, target2_;
    AdamState actor_opt_, critic1_opt_, critic2_opt_;
    double log_alpha_;
    ScalarAdam alpha_opt_;
    double target_entropy_;
    long updates_ = 0;
};

}  // namespace rmm
