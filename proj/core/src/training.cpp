#include "rmm/training.hpp"

#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rmm/policies.hpp"

namespace rmm {

namespace {

struct LossMeter {
    double sum = 0.0;
    long count = 0;
    void add(double v) {
        sum += v;
        ++count;
    }
    double mean() const { return count > 0 ? sum / static_cast<double>(count) : 0.0; }
};

void finish_episode(TrainingLog& log, int episode, double total_reward, const EnvState& state, double loss,
                    double exploration, long env_steps, const ProgressFn& progress) {
    EpisodeLog entry;
    entry.episode = episode;
    entry.total_reward = total_reward;
    entry.terminal_wealth = state.wealth();
    entry.terminal_inventory = state.portfolio.inventory;
    entry.loss = loss;
    entry.exploration = exploration;
    entry.env_steps = env_steps;
    log.episodes.push_back(entry);
    if (progress) progress(entry);
}

}  // namespace

void TrainingLog::write_csv(std::ostream& out) const {
    out << "episode,total_reward,terminal_wealth,terminal_inventory,loss,exploration,env_steps\n";
    for (const auto& e : episodes)
        fmt::print(out, "{},{:.6f},{:.6f},{},{:.6f},{:.6f},{}\n", e.episode, e.total_reward, e.terminal_wealth,
                   e.terminal_inventory, e.loss, e.exploration, e.env_steps);
}

SacTrainingResult train_mm_sac(const EnvConfig& env, AdversaryPolicy& adversary, const SacConfig& config, Rng& rng,
                               const ProgressFn& progress) {
    env.validate();
    SacAgent agent(kObservationDim, ActionBox::symmetric(2, kOffsetBound), config, rng);
    ReplayBuffer buffer(config.buffer_capacity, kObservationDim, 2);
    SacTrainingResult result;
    result.log.episodes.reserve(static_cast<std::size_t>(config.episodes));
    long total_steps = 0;

    for (int episode = 0; episode < config.episodes; ++episode) {
        EnvState state = reset(env, rng);
        adversary.begin_episode(env.market, rng);
        double total_reward = 0.0;
        LossMeter loss;
        while (!state.terminal()) {
            const auto features = observation_features(state.observe());
            const SacSample sample =
                total_steps < config.warmup_steps ? agent.random_action(rng) : agent.act(features, false, rng);
            const QuoteAction action = QuoteAction::two_sided(sample.action[0], sample.action[1]);
            StepResult r = step(env, state, action, adversary, rng);
            const auto next_features = observation_features(r.next.observe());
            buffer.add(features, sample.normalized, r.mm_reward, next_features, r.next.terminal());
            total_reward += r.mm_reward;
            state = r.next;
            ++total_steps;
            if (total_steps >= config.warmup_steps && total_steps % config.update_interval == 0) {
                for (int g = 0; g < config.steps_per_round(); ++g)
                    if (auto l = agent.update(buffer, rng)) loss.add(l->critic);
            }
        }
        finish_episode(result.log, episode, total_reward, state, loss.mean(), agent.alpha(), total_steps, progress);
    }
    result.actor = agent.actor();
    return result;
}

SacTrainingResult train_adversary_sac(const EnvConfig& env, const QuotePolicy& opponent, AdversaryKind kind,
                                      const SacConfig& config, Rng& rng, const ProgressFn& progress) {
    env.validate();
    if (!is_strategic(kind)) throw std::invalid_argument("only strategic adversaries are trained");
    const int dim = action_dim(kind);
    SacAgent agent(kObservationDim, ActionBox::symmetric(dim, 1.0), config, rng);
    ReplayBuffer buffer(config.buffer_capacity, kObservationDim, dim);
    SacTrainingResult result;
    result.log.episodes.reserve(static_cast<std::size_t>(config.episodes));
    long total_steps = 0;

    for (int episode = 0; episode < config.episodes; ++episode) {
        EnvState state = reset(env, rng);
        double total_reward = 0.0;
        LossMeter loss;
        while (!state.terminal()) {
            const Observation obs = state.observe();
            const auto features = observation_features(obs);
            const SacSample sample =
                total_steps < config.warmup_steps ? agent.random_action(rng) : agent.act(features, false, rng);
            const MarketParams params = strategic_params(kind, sample.normalized, env.market);
            const QuoteAction action = opponent.quote(obs, rng);
            StepResult r = step_with_params(env, state, action, params, rng);
            const auto next_features = observation_features(r.next.observe());
            buffer.add(features, sample.normalized, r.adversary_reward, next_features, r.next.terminal());
            total_reward += r.adversary_reward;
            state = r.next;
            ++total_steps;
            if (total_steps >= config.warmup_steps && total_steps % config.update_interval == 0) {
                for (int g = 0; g < config.steps_per_round(); ++g)
                    if (auto l = agent.update(buffer, rng)) loss.add(l->critic);
            }
        }
        finish_episode(result.log, episode, total_reward, state, loss.mean(), agent.alpha(), total_steps, progress);
    }
    result.actor = agent.actor();
    return result;
}

DqnTrainingResult train_gate_dqn(const EnvConfig& env, std::shared_ptr<const OffsetPolicy> frozen_mm,
                                 AdversaryPolicy& adversary, int n_actions, const DqnConfig& config, Rng& rng,
                                 const ProgressFn& progress) {
    env.validate();
    if (!frozen_mm) throw std::invalid_argument("gate training requires a frozen always-quoting policy");
    if (n_actions != 2 && n_actions != 4) throw std::invalid_argument("gate must have 2 or 4 actions");
    DqnAgent agent(kObservationDim, n_actions, config, rng);
    ReplayBuffer buffer(config.buffer_capacity, kObservationDim, 1);
    DqnTrainingResult result;
    result.log.episodes.reserve(static_cast<std::size_t>(config.episodes));
    const long planned_steps = static_cast<long>(config.episodes) * env.market.n_steps;
    long total_steps = 0;
    double epsilon = config.epsilon_start;

    for (int episode = 0; episode < config.episodes; ++episode) {
        EnvState state = reset(env, rng);
        adversary.begin_episode(env.market, rng);
        double total_reward = 0.0;
        LossMeter loss;
        while (!state.terminal()) {
            const Observation obs = state.observe();
            const auto features = observation_features(obs);
            epsilon = epsilon_at(total_steps, planned_steps, config);
            const int choice = agent.act(features, epsilon, rng);
            const QuoteAction action = expand_quote_mode(choice, n_actions, frozen_mm.get(), obs);
            StepResult r = step(env, state, action, adversary, rng);
            const auto next_features = observation_features(r.next.observe());
            const double stored_action = choice;
            buffer.add(features, std::span<const double>(&stored_action, 1), r.mm_reward, next_features,
                       r.next.terminal());
            total_reward += r.mm_reward;
            state = r.next;
            ++total_steps;
            if (total_steps >= config.warmup_steps && total_steps % config.update_interval == 0)
                if (auto l = agent.update(buffer, rng)) loss.add(*l);
        }
        finish_episode(result.log, episode, total_reward, state, loss.mean(), epsilon, total_steps, progress);
    }
    result.q_net = agent.q_net();
    return result;
}

}  // namespace rmm
