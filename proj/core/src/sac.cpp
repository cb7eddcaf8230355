#include "rmm/sac.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rmm {

namespace {

// log(1 - tanh(u)^2), stable for large |u|.
double log_one_minus_tanh_sq(double u) {
    const double a = std::abs(u);
    return 2.0 * (std::numbers::ln2 - a - std::log1p(std::exp(-2.0 * a)));
}

Matrix column(std::span<const double> values) {
    Matrix m(static_cast<Eigen::Index>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = values[i];
    return m;
}

Matrix gaussian_noise(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    Matrix noise(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) noise(i, j) = standard_normal(rng);
    return noise;
}

}  // namespace

void SacConfig::validate() const {
    if (episodes < 1) throw std::invalid_argument("sac.episodes must be at least 1");
    if (update_interval < 1) throw std::invalid_argument("sac.update_interval must be at least 1");
    if (gradient_steps < 0) throw std::invalid_argument("sac.gradient_steps must be non-negative");
    if (!(lr_actor > 0.0) || !(lr_critic > 0.0) || !(lr_alpha > 0.0))
        throw std::invalid_argument("sac learning rates must be positive");
    if (batch < 1) throw std::invalid_argument("sac.batch must be at least 1");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("sac.gamma must lie in [0, 1]");
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("sac.tau must lie in (0, 1]");
    if (fixed_alpha && !(*fixed_alpha >= 0.0)) throw std::invalid_argument("sac.alpha must be non-negative");
    if (!(initial_alpha > 0.0)) throw std::invalid_argument("sac.initial_alpha must be positive");
    if (hidden.empty()) throw std::invalid_argument("sac.hidden must list at least one layer");
    for (int h : hidden)
        if (h < 1) throw std::invalid_argument("sac.hidden sizes must be positive");
    if (warmup_steps < 0) throw std::invalid_argument("sac.warmup_steps must be non-negative");
    if (buffer_capacity < static_cast<std::size_t>(batch))
        throw std::invalid_argument("sac.buffer_capacity must be at least the batch size");
}

std::vector<double> ActionBox::to_box(std::span<const double> normalized) const {
    if (normalized.size() != low.size()) throw std::invalid_argument("action dimension mismatch");
    std::vector<double> out(normalized.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double y = std::clamp(normalized[i], -1.0, 1.0);
        out[i] = std::clamp(low[i] + 0.5 * (y + 1.0) * (high[i] - low[i]), low[i], high[i]);
    }
    return out;
}

ActionBox ActionBox::symmetric(int dim, double bound) {
    return {std::vector<double>(static_cast<std::size_t>(dim), -bound),
            std::vector<double>(static_cast<std::size_t>(dim), bound)};
}

std::vector<double> deterministic_action(const Mlp& actor, std::span<const double> features) {
    const Matrix out = actor.predict(column(features));
    const Eigen::Index d = out.rows() / 2;
    std::vector<double> y(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) y[static_cast<std::size_t>(i)] = std::tanh(out(i, 0));
    return y;
}

SacAgent::SacAgent(int obs_dim, ActionBox box, const SacConfig& config, Rng& rng)
    : obs_dim_(obs_dim), box_(std::move(box)), config_(config) {
    config_.validate();
    if (box_.dim() < 1 || box_.high.size() != box_.low.size())
        throw std::invalid_argument("action box is malformed");
    const int d = box_.dim();

    std::vector<int> actor_sizes{obs_dim};
    actor_sizes.insert(actor_sizes.end(), config_.hidden.begin(), config_.hidden.end());
    actor_sizes.push_back(2 * d);
    std::vector<int> critic_sizes{obs_dim + d};
    critic_sizes.insert(critic_sizes.end(), config_.hidden.begin(), config_.hidden.end());
    critic_sizes.push_back(1);

    actor_ = Mlp(actor_sizes, config_.activation, rng, 0.01);
    critic1_ = Mlp(critic_sizes, config_.activation, rng);
    critic2_ = Mlp(critic_sizes, config_.activation, rng);
    target1_ = critic1_;
    target2_ = critic2_;

    actor_opt_ = AdamState(actor_, AdamConfig{config_.lr_actor});
    critic1_opt_ = AdamState(critic1_, AdamConfig{config_.lr_critic});
    critic2_opt_ = AdamState(critic2_, AdamConfig{config_.lr_critic});
    alpha_opt_.config.learning_rate = config_.lr_alpha;
    log_alpha_ = std::log(config_.fixed_alpha ? std::max(*config_.fixed_alpha, 1e-300) : config_.initial_alpha);
    target_entropy_ = -static_cast<double>(d);
}

double SacAgent::alpha() const noexcept {
    if (config_.fixed_alpha) return *config_.fixed_alpha;
    return std::exp(log_alpha_);
}

SacAgent::PolicyDraw SacAgent::draw(const Matrix& actor_out, const Matrix& noise) const {
    const Eigen::Index d = box_.dim();
    PolicyDraw p;
    p.mean = actor_out.topRows(d);
    const Matrix raw_log_std = actor_out.bottomRows(d);
    p.log_std = raw_log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
    p.clamp_mask = ((raw_log_std.array() >= kLogStdMin) && (raw_log_std.array() <= kLogStdMax)).cast<double>();
    p.std = p.log_std.array().exp();
    p.noise = noise;
    p.pre_tanh = p.mean + p.std.cwiseProduct(noise);
    p.action = p.pre_tanh.array().tanh();
    p.log_prob = Vector::Zero(actor_out.cols());
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    for (Eigen::Index j = 0; j < actor_out.cols(); ++j) {
        double lp = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) {
            lp += -0.5 * noise(i, j) * noise(i, j) - p.log_std(i, j) - half_log_2pi -
                  log_one_minus_tanh_sq(p.pre_tanh(i, j));
        }
        p.log_prob(j) = lp;
    }
    return p;
}

Matrix SacAgent::critic_input(const Matrix& obs, const Matrix& action) const {
    Matrix in(obs.rows() + action.rows(), obs.cols());
    in.topRows(obs.rows()) = obs;
    in.bottomRows(action.rows()) = action;
    return in;
}

SacSample SacAgent::act(std::span<const double> features, bool deterministic, Rng& rng) const {
    if (static_cast<int>(features.size()) != obs_dim_) throw std::invalid_argument("observation dimension mismatch");
    SacSample s;
    if (deterministic) {
        s.normalized = deterministic_action(actor_, features);
    } else {
        const Matrix out = actor_.predict(column(features));
        const PolicyDraw p = draw(out, gaussian_noise(box_.dim(), 1, rng));
        s.normalized.assign(p.action.data(), p.action.data() + p.action.size());
    }
    s.action = box_.to_box(s.normalized);
    return s;
}

SacSample SacAgent::random_action(Rng& rng) const {
    SacSample s;
    s.normalized.resize(static_cast<std::size_t>(box_.dim()));
    for (auto& y : s.normalized) y = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    s.action = box_.to_box(s.normalized);
    return s;
}

ActorObjective SacAgent::actor_objective(const Matrix& obs, const Matrix& noise) {
    const double alpha = this->alpha();
    const auto batch = static_cast<double>(obs.cols());
    const Matrix out = actor_.forward(obs);
    const PolicyDraw p = draw(out, noise);

    const Matrix in = critic_input(obs, p.action);
    const Matrix q1 = critic1_.forward(in);
    const Matrix q2 = critic2_.forward(in);
    Matrix pick1(1, obs.cols()), pick2(1, obs.cols());
    Vector q_min(obs.cols());
    for (Eigen::Index j = 0; j < obs.cols(); ++j) {
        const bool first = q1(0, j) <= q2(0, j);
        pick1(0, j) = first ? 1.0 : 0.0;
        pick2(0, j) = first ? 0.0 : 1.0;
        q_min(j) = first ? q1(0, j) : q2(0, j);
    }
    const Matrix dq_din = critic1_.backward(pick1, false).input + critic2_.backward(pick2, false).input;
    const Matrix dq_dy = dq_din.bottomRows(box_.dim());

    ActorObjective result;
    result.loss = (alpha * p.log_prob - q_min).mean();
    result.mean_log_prob = p.log_prob.mean();

    // d/du of [alpha * log pi - Q(tanh u)], with u = mean + std * noise.
    const Matrix tanh_u = p.action;
    const Matrix grad_u =
        (alpha * 2.0 * tanh_u.array() - dq_dy.array() * (1.0 - tanh_u.array().square())) / batch;
    Matrix upstream(out.rows(), out.cols());
    upstream.topRows(box_.dim()) = grad_u;
    upstream.bottomRows(box_.dim()) =
        (grad_u.array() * p.std.array() * p.noise.array() - alpha / batch) * p.clamp_mask.array();
    result.gradients = actor_.backward(upstream);
    return result;
}

std::optional<SacLosses> SacAgent::update(const ReplayBuffer& buffer, Rng& rng) {
    const auto batch_size = static_cast<std::size_t>(config_.batch);
    if (buffer.size() < batch_size) return std::nullopt;
    const ReplayBatch batch = buffer.sample(batch_size, rng);
    const double alpha = this->alpha();
    const auto n = static_cast<double>(batch_size);
    SacLosses losses;

    // Critic targets.
    const Matrix next_out = actor_.predict(batch.next_obs);
    const PolicyDraw next = draw(next_out, gaussian_noise(box_.dim(), batch.next_obs.cols(), rng));
    const Matrix next_in = critic_input(batch.next_obs, next.action);
    const Matrix tq1 = target1_.predict(next_in);
    const Matrix tq2 = target2_.predict(next_in);
    Vector target(batch.reward.size());
    for (Eigen::Index j = 0; j < target.size(); ++j) {
        const double soft_value = std::min(tq1(0, j), tq2(0, j)) - alpha * next.log_prob(j);
        target(j) = batch.reward(j) + config_.gamma * (1.0 - batch.done(j)) * soft_value;
    }

    const Matrix in = critic_input(batch.obs, batch.action);
    auto fit_critic = [&](Mlp& critic, AdamState& opt) {
        const Matrix q = critic.forward(in);
        const Matrix err = q - target.transpose();
        const MlpGradients g = critic.backward(2.0 * err / n);
        adam_step(critic, g, opt);
        return err.squaredNorm() / n;
    };
    losses.critic = 0.5 * (fit_critic(critic1_, critic1_opt_) + fit_critic(critic2_, critic2_opt_));

    // Actor.
    const ActorObjective objective = actor_objective(batch.obs, gaussian_noise(box_.dim(), batch.obs.cols(), rng));
    adam_step(actor_, objective.gradients, actor_opt_);
    losses.actor = objective.loss;
    losses.entropy = -objective.mean_log_prob;

    // Temperature: minimize -log_alpha * (log pi + target_entropy).
    if (!config_.fixed_alpha) {
        const double grad = -(objective.mean_log_prob + target_entropy_);
        losses.alpha = -log_alpha_ * (objective.mean_log_prob + target_entropy_);
        log_alpha_ = alpha_opt_.step(log_alpha_, grad);
    }

    target1_.blend_from(critic1_, config_.tau);
    target2_.blend_from(critic2_, config_.tau);
    ++updates_;
    return losses;
}

}  // namespace rmm
